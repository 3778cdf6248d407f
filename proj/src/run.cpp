#include "helilab/run.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "helilab/errors.hpp"
#include "helilab/geometry.hpp"
#include "helilab/snapshot.hpp"

namespace helilab {

// ---------------------------------------------------------------------------
// Experiments

std::vector<MsmComparisonRow> compare_msm_routes(const SphereField& u0, double b, double T, double dt,
                                                 int homotopy_steps, int record_every,
                                                 const std::vector<double>& sobolev_exponents) {
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  const Frame frame0 = coulomb_fix(u0, build_frame(u0, homotopy_steps));
  MsmState direct = msm_initial_state(u0, frame0);
  SphereField u = u0;
  const Rk4Options rk;
  const auto total = static_cast<std::size_t>(std::llround(std::ceil(T / dt - 1e-9)));

  std::vector<MsmComparisonRow> rows;
  const auto compare = [&](double t, std::size_t steps_done) {
    MsmComparisonRow row;
    row.diag = diagnose(u, b, t, sobolev_exponents);
    const Frame f = coulomb_fix(u, build_frame(u, homotopy_steps));
    const GaugeData g = extract_gauge(u, f, b);
    const cplx c = align_phase(direct.psi, g.psi);
    ComplexPairField rotated = direct.psi;
    rotated[0] *= c;
    rotated[1] *= c;
    row.psi_difference = l2_distance(rotated, g.psi);
    row.phase = std::arg(c);
    row.extracted_div_A = spectral::max_abs(divergence(g.A));
    const Frame df{direct.v, direct.w};
    const auto dA = connection(df);
    row.direct_div_A = spectral::max_abs(divergence(dA));
    const auto riesz = connection_from_psi(direct.psi);
    for (std::size_t m = 0; m < 2; ++m) {
      ScalarField d = dA[m];
      d -= riesz[m];
      const double mu = spectral::mean(d);
      for (double& x : d.values()) x -= mu;
      row.direct_frame_drift = std::max(row.direct_frame_drift, spectral::max_abs(d));
    }
    (void)steps_done;
    rows.push_back(std::move(row));
  };

  compare(0.0, 0);
  std::size_t done = 0;
  while (done < total) {
    const std::size_t chunk = std::min<std::size_t>(static_cast<std::size_t>(record_every), total - done);
    for (std::size_t k = 0; k < chunk; ++k) {
      const double t = static_cast<double>(done + k) * dt;
      const double h = std::min(dt, T - t);
      u = rk4_step(u, b, h, rk);
    }
    const double t_end = done + chunk == total ? T : static_cast<double>(done + chunk) * dt;
    direct = msm_evolve(direct, b, t_end - direct.t, dt, static_cast<int>(chunk)).state;
    done += chunk;
    compare(t_end, done);
  }
  return rows;
}

std::vector<DeltaConvergenceRow> delta_convergence(const SphereField& u0, const EvolveOptions& base,
                                                   const std::vector<double>& deltas) {
  EvolveOptions ref = base;
  ref.scheme = Scheme::rk4;
  ref.sobolev_exponents.clear();
  ref.diag_every = 1 << 30;
  const SphereField u_ref = evolve(u0, ref).u;

  std::vector<DeltaConvergenceRow> rows;
  for (double delta : deltas) {
    EvolveOptions o = base;
    o.scheme = Scheme::hyperbolic_delta;
    o.delta = delta;
    o.sobolev_exponents.clear();
    o.diag_every = 1 << 30;
    EvolveResult r = evolve(u0, o);
    DeltaConvergenceRow row;
    row.delta = delta;
    Vector3Field d = r.u.vec();
    d -= u_ref.vec();
    row.l2_error = std::sqrt(spectral::integral(dot(d, d)));
    if (!rows.empty())
      row.order = std::log(rows.back().l2_error / row.l2_error) / std::log(rows.back().delta / delta);
    row.stats = r.stats;
    rows.push_back(row);
  }
  return rows;
}

double fitted_order(const std::vector<DeltaConvergenceRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(r.delta), y = std::log(r.l2_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Vector3Field continuity_direction(const GridPtr& grid) {
  const double c = 0.5 * grid->length();
  const ScalarField g = sample(grid, [c](double x1, double x2) {
    const double r2 = (x1 - c - 0.5) * (x1 - c - 0.5) + (x2 - c - 0.3) * (x2 - c - 0.3);
    return std::exp(-r2 / (2.0 * 0.7 * 0.7));
  });
  ScalarField g2 = g;
  g2 *= 0.5;
  return Vector3Field(g, std::move(g2), ScalarField(grid));
}

std::vector<ContinuityRow> continuity_table(const SphereField& u0, double b, double T, double dt, double s,
                                            const std::vector<double>& eps, const std::vector<double>& h,
                                            int sample_every) {
  if (sample_every < 1) throw std::invalid_argument("sample_every must be >= 1");
  const double sigma = s - 1.0;
  const auto dist = [sigma](const SphereField& a, const SphereField& c) {
    Vector3Field d = a.vec();
    d -= c.vec();
    return spectral::sobolev_norm(d.components(), sigma);
  };
  EvolveOptions o;
  o.scheme = Scheme::rk4;
  o.b = b;
  o.T = T;
  o.dt = dt;
  o.diag_every = 1 << 30;

  std::vector<SphereField> base;
  evolve(u0, o, [&](const SphereField& u, double, std::size_t step) {
    if (step % static_cast<std::size_t>(sample_every) == 0) base.push_back(u);
  });

  const Vector3Field phi = continuity_direction(u0.grid_ptr());
  std::vector<ContinuityRow> rows;
  for (double e : eps) {
    Vector3Field y = u0.vec();
    y.add_scaled(e, phi);
    const SphereField u1 = project_to_sphere(y);
    for (double hh : h) {
      const SphereField uh = interpolate_initial_data(u0, u1, hh);
      ContinuityRow row;
      row.eps = e;
      row.h = hh;
      row.initial_distance = dist(uh, u0);
      evolve(uh, o, [&](const SphereField& u, double, std::size_t step) {
        if (step % static_cast<std::size_t>(sample_every) == 0)
          row.max_distance = std::max(row.max_distance, dist(u, base[step / static_cast<std::size_t>(sample_every)]));
      });
      row.ratio = row.max_distance / row.initial_distance;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output helpers

std::string git_blob_sha1(const std::string& bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + std::string(1, '\0');
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sigma_label(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "hs_%g", s);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

std::vector<std::string> diag_header(const std::vector<double>& s) {
  std::vector<std::string> h{"t", "energy", "l2_dist_sq", "l2_rhs_integral", "unit_violation"};
  for (double x : s) h.push_back(sigma_label(x));
  return h;
}

std::vector<std::string> diag_cells(const DiagnosticsRecord& r, const std::vector<double>& s) {
  std::vector<std::string> c{num(r.t), num(r.energy), num(r.l2_dist_sq), num(r.l2_rhs_integral), num(r.unit_violation)};
  for (double x : s) c.push_back(num(r.hs_norms.at(x)));
  return c;
}

EvolveOptions evolve_options(const RunConfig& c) {
  EvolveOptions o;
  o.scheme = c.scheme;
  o.b = c.b;
  o.T = c.T;
  o.dt = c.dt;
  o.delta = c.delta.front();
  o.C0 = c.C0;
  o.C1 = c.C1;
  o.max_iter = c.max_iter;
  o.contraction_tol = c.contraction_tol;
  o.diag_every = c.diag_every;
  o.sobolev_exponents = c.s_monitor;
  return o;
}

struct Context {
  const RunConfig& cfg;
  GridPtr grid;
  SphereField u0;
  std::ostream& log;
  std::vector<std::string> artifacts;
  std::filesystem::path path(const std::string& name) {
    artifacts.push_back(name);
    return cfg.output_dir / name;
  }
};

// Evolution with CSV rows streamed as diagnostics appear and the last good
// state flushed to disk if the integrator fails.
void evolve_with_outputs(Context& ctx, const EvolveOptions& o, const std::string& csv_name,
                         const std::vector<std::string>& extra_header,
                         const std::function<std::vector<std::string>(const SphereField&, const DiagnosticsRecord&)>&
                             extra_cells) {
  std::vector<std::string> header = diag_header(o.sobolev_exponents);
  header.insert(header.end(), extra_header.begin(), extra_header.end());
  CsvWriter csv(ctx.path(csv_name));
  csv.row(header);

  SphereField last = ctx.u0;
  double last_t = 0.0;
  std::size_t last_step = 0;
  double rate = l2_growth_rhs(ctx.u0, o.b), integral = 0.0;
  const auto emit = [&](const SphereField& u, double t) {
    DiagnosticsRecord rec = diagnose(u, o.b, t, o.sobolev_exponents);
    rec.l2_rhs_integral = integral;
    auto cells = diag_cells(rec, o.sobolev_exponents);
    if (extra_cells) {
      const auto more = extra_cells(u, rec);
      cells.insert(cells.end(), more.begin(), more.end());
    }
    csv.row(cells);
  };

  const auto snap_every = static_cast<std::size_t>(ctx.cfg.snapshot_every);
  EvolveOptions quiet = o;
  quiet.diag_every = 1 << 30;
  quiet.sobolev_exponents.clear();
  emit(ctx.u0, 0.0);
  try {
    const double eps_t = 1e-12 * std::max(1.0, o.T);
    evolve(ctx.u0, quiet, [&](const SphereField& u, double t, std::size_t step) {
      if (step == 0) return;
      const double r = l2_growth_rhs(u, o.b);
      integral += 0.5 * (t - last_t) * (rate + r);
      rate = r;
      last = u;
      last_t = t;
      last_step = step;
      const bool final_step = !(t < o.T - eps_t);
      if (step % static_cast<std::size_t>(o.diag_every) == 0 || final_step) emit(u, t);
      if (snap_every > 0 && step % snap_every == 0) {
        char name[48];
        std::snprintf(name, sizeof name, "snap_%08zu.hll", step);
        write_snapshot(ctx.path(name), u.vec(), t, o.b);
      }
    });
  } catch (const SolverError&) {
    write_snapshot(ctx.path("last_good.hll"), last.vec(), last_t, o.b);
    ctx.log << "last good state (step " << last_step << ", t = " << last_t << ") written to last_good.hll\n";
    throw;
  }
  write_snapshot(ctx.path("final.hll"), last.vec(), last_t, o.b);
}

void run_simulate(Context& ctx) { evolve_with_outputs(ctx, evolve_options(ctx.cfg), "diagnostics.csv", {}, {}); }

void run_blowup_watch(Context& ctx) {
  const double sigma = 2.0 + ctx.cfg.eps0;
  const double initial = blowup_monitor(ctx.u0, ctx.cfg.eps0);
  const double threshold = ctx.cfg.alarm_factor * std::max(initial, 1e-300);
  int alarms = 0;
  evolve_with_outputs(ctx, evolve_options(ctx.cfg), "blowup.csv", {"blowup_monitor", "alarm"},
                      [&](const SphereField& u, const DiagnosticsRecord& rec) {
                        const double m = blowup_monitor(u, ctx.cfg.eps0);
                        const bool alarm = !(m <= threshold);
                        if (alarm) {
                          ++alarms;
                          ctx.log << "alarm: ||u - k||_{H^" << sigma << "} = " << m << " at t = " << rec.t
                                  << " exceeds " << ctx.cfg.alarm_factor << " x initial\n";
                        }
                        return std::vector<std::string>{num(m), alarm ? "1" : "0"};
                      });
  ctx.log << "blow-up monitor: " << alarms << " alarm row(s)\n";
}

void run_verify_gauge(Context& ctx) {
  const Frame raw = build_frame(ctx.u0, ctx.cfg.homotopy_steps);
  const Frame frame = coulomb_fix(ctx.u0, raw);
  const GaugeData g = extract_gauge(ctx.u0, frame, ctx.cfg.b);
  const auto residuals = verify_relations(ctx.u0, frame, g);
  const FrameReport fr = frame_report(ctx.u0, frame);
  std::ofstream out(ctx.path("residuals.txt"));
  for (const auto& [k, v] : residuals) out << k << " = " << num(v) << "\n";
  out << "# frame_unit = " << num(fr.unit) << "\n# frame_tangency = " << num(fr.tangency)
      << "\n# frame_orientation = " << num(fr.orientation) << "\n# frame_boundary = " << num(fr.boundary)
      << "\n# A_mean_1 = " << num(g.A_mean[0]) << "\n# A_mean_2 = " << num(g.A_mean[1]) << "\n";
  double worst = 0.0;
  for (const auto& [k, v] : residuals) worst = std::max(worst, v);
  ctx.log << "verify-gauge: largest residual " << worst << "\n";
}

void run_converge_delta(Context& ctx) {
  const auto rows = delta_convergence(ctx.u0, evolve_options(ctx.cfg), ctx.cfg.delta);
  CsvWriter csv(ctx.path("convergence.csv"));
  csv.row({"delta", "l2_error", "order", "windows", "max_contraction_ratio", "max_sweeps", "max_ball_ratio"});
  for (const auto& r : rows)
    csv.row({num(r.delta), num(r.l2_error), num(r.order), std::to_string(r.stats.steps),
             num(r.stats.max_contraction_ratio), std::to_string(r.stats.max_sweeps), num(r.stats.max_ball_ratio)});
  if (rows.size() >= 2) ctx.log << "converge-delta: fitted order " << fitted_order(rows) << "\n";
}

void run_compare_msm(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto rows = compare_msm_routes(ctx.u0, c.b, c.T, c.dt, c.homotopy_steps, c.diag_every, c.s_monitor);
  auto header = diag_header(c.s_monitor);
  for (const char* h : {"psi_difference", "phase", "direct_div_A", "direct_frame_drift", "extracted_div_A"})
    header.emplace_back(h);
  CsvWriter csv(ctx.path("compare_msm.csv"));
  csv.row(header);
  for (const auto& r : rows) {
    auto cells = diag_cells(r.diag, c.s_monitor);
    for (double x : {r.psi_difference, r.phase, r.direct_div_A, r.direct_frame_drift, r.extracted_div_A})
      cells.push_back(num(x));
    csv.row(cells);
  }
  ctx.log << "compare-msm: psi difference at T = " << rows.back().psi_difference << "\n";
}

void run_continuity(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto rows = continuity_table(ctx.u0, c.b, c.T, c.dt, c.continuity_s, c.perturbation, c.h_samples, c.diag_every);
  CsvWriter csv(ctx.path("continuity.csv"));
  csv.row({"eps", "h", "initial_distance", "max_distance", "ratio"});
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : rows) {
    csv.row({num(r.eps), num(r.h), num(r.initial_distance), num(r.max_distance), num(r.ratio)});
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  ctx.log << "continuity: ratio range [" << lo << ", " << hi << "]\n";
}

void write_manifest(Context& ctx, const RunInputs& in, const std::string& status) {
  std::ofstream out(ctx.cfg.output_dir / "manifest.txt");
  const std::string echo = echo_config(ctx.cfg);
  out << "# helilab run manifest\n";
  out << "mode = " << mode_name(ctx.cfg.mode) << "\n";
  out << "status = " << status << "\n";
  out << "config_path = " << in.config_path << "\n";
  out << "config_sha1 = " << git_blob_sha1(in.config_text) << "\n";
  out << "effective_config_sha1 = " << git_blob_sha1(echo) << "\n";
  for (const auto& o : in.overrides) out << "override = " << o << "\n";
  for (const auto& a : ctx.artifacts) out << "artifact = " << a << "\n";
  out << "\n# effective configuration\n" << echo;
}

}  // namespace

int run(const RunConfig& cfg, const RunInputs& inputs, std::ostream& log) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) {
    log << "error: cannot create output directory '" << cfg.output_dir.string() << "': " << ec.message() << "\n";
    return kExitConfig;
  }
  GridPtr grid;
  try {
    grid = SpectralGrid::create(cfg.n, cfg.L);
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  Context ctx{cfg, grid, SphereField::constant(grid, kNorth), log, {}};
  int status = kExitOk;
  std::string message = "ok";
  try {
    ctx.u0 = make_initial_data(grid, cfg.initial_condition);
    switch (cfg.mode) {
      case RunMode::simulate: run_simulate(ctx); break;
      case RunMode::verify_gauge: run_verify_gauge(ctx); break;
      case RunMode::converge_delta: run_converge_delta(ctx); break;
      case RunMode::compare_msm: run_compare_msm(ctx); break;
      case RunMode::continuity: run_continuity(ctx); break;
      case RunMode::blowup_watch: run_blowup_watch(ctx); break;
    }
  } catch (const SolverError& e) {
    status = kExitRuntime;
    message = std::string("runtime failure: ") + e.what();
  } catch (const std::invalid_argument& e) {
    status = kExitConfig;
    message = std::string("config error: ") + e.what();
  } catch (const ConfigError& e) {
    status = kExitConfig;
    message = std::string("config error: ") + e.what();
  }
  if (status != kExitOk) log << message << "\n";
  write_manifest(ctx, inputs, message);
  return status;
}

}  // namespace helilab
