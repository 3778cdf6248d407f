#include "helilab/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "helilab/errors.hpp"

namespace helilab {

// ---------------------------------------------------------------------------
// RK4

double rk4_max_stable_dt(const SpectralGrid& grid, double stability_factor) {
  return stability_factor * grid.spacing() * grid.spacing();
}

namespace {

// The 2/3 truncation of u x h leaves a small normal component; it is removed
// again so that |y| is conserved up to the Runge-Kutta error.
Vector3Field rk_rhs(const Vector3Field& y, double b, bool dealias_rhs) {
  Vector3Field r = ll_rhs(y, b);
  if (!dealias_rhs) return r;
  r = dealias(r);
  const ScalarField ry = dot(r, y);
  const ScalarField yy = dot(y, y);
  const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double f = ry[i] / yy[i];
    for (int c = 0; c < 3; ++c) r[c][i] -= f * y[c][i];
  }
  return r;
}

}  // namespace

Rk4Step rk4_step_report(const SphereField& u, double b, double dt, const Rk4Options& opts) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const double limit = rk4_max_stable_dt(u.grid(), opts.stability_factor);
  if (dt > limit)
    throw std::invalid_argument("time step " + std::to_string(dt) + " exceeds the RK4 stability bound " +
                                std::to_string(limit));
  const Vector3Field& y0 = u.vec();
  const Vector3Field k1 = rk_rhs(y0, b, opts.dealias);
  Vector3Field y = y0;
  y.add_scaled(0.5 * dt, k1);
  const Vector3Field k2 = rk_rhs(y, b, opts.dealias);
  y = y0;
  y.add_scaled(0.5 * dt, k2);
  const Vector3Field k3 = rk_rhs(y, b, opts.dealias);
  y = y0;
  y.add_scaled(dt, k3);
  const Vector3Field k4 = rk_rhs(y, b, opts.dealias);

  y = y0;
  y.add_scaled(dt / 6.0, k1);
  y.add_scaled(dt / 3.0, k2);
  y.add_scaled(dt / 3.0, k3);
  y.add_scaled(dt / 6.0, k4);
  if (!all_finite(y)) throw NonFinite("non-finite value in RK4 step");
  const double violation = max_unit_violation(y);
  return {project_to_sphere(y), violation};
}

SphereField rk4_step(const SphereField& u, double b, double dt, const Rk4Options& opts) {
  return rk4_step_report(u, b, dt, opts).u;
}

// ---------------------------------------------------------------------------
// Hyperbolic regularization

Vector3Field f_delta(const Vector3Field& U, const Vector3Field& V, double delta, double b, bool dealias_out) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  const auto grad = gradient(U);
  const Vector3Field UxV = cross(U, V);
  const Vector3Field Uxd1 = cross(U, grad[0]);
  const Vector3Field Uxd2 = cross(U, grad[1]);
  Vector3Field F(U.grid_ptr());
  const auto n = static_cast<std::ptrdiff_t>(U.size());
  const double inv_delta = 1.0 / delta;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double grad_sq = 0.0, v_sq = 0.0;
    for (int c = 0; c < 3; ++c) {
      grad_sq += grad[0][c][i] * grad[0][c][i] + grad[1][c][i] * grad[1][c][i];
      v_sq += V[c][i] * V[c][i];
    }
    for (int c = 0; c < 3; ++c) {
      F[c][i] = -inv_delta * UxV[c][i] + (grad_sq - v_sq) * U[c][i] -
                b * (U[0][i] * Uxd1[c][i] + U[1][i] * Uxd2[c][i]);
    }
  }
  return dealias_out ? dealias(F) : F;
}

double wave_state_size(const WaveState& state) {
  const Vector3Field d = deviation_from_north(state.U);
  return spectral::sobolev_norm(d.components(), kContractionSobolevIndex) +
         spectral::sobolev_norm(state.V.components(), kContractionSobolevIndex - 1.0);
}

double contraction_window(const WaveState& state, double C0) {
  const double size = wave_state_size(state);
  return C0 * state.delta / ((size + 1.0) * (size + 1.0));
}

double DuhamelTrace::max_ratio() const {
  double r = 0.0;
  for (std::size_t i = 1; i < distances.size(); ++i)
    if (distances[i - 1] > 0.0) r = std::max(r, distances[i] / distances[i - 1]);
  return r;
}

namespace {

constexpr int kNodes = 4;
constexpr int kTargets = kNodes + 1;  // the collocation nodes plus the window end
constexpr double kGaussNodes[kNodes] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                        0.8611363115940526};

// Gauss-Legendre rule on [-1, 1] with m points (Newton on P_m).
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(m), 0.0);
  w.assign(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Per-mode weights of the Duhamel integrals against the Lagrange basis of the
// collocation nodes:
//   sin_w[j][q](xi) = int_0^{t_j} sin(w (t_j - s)) / w  l_q(s) ds
//   cos_w[j][q](xi) = int_0^{t_j} cos(w (t_j - s))      l_q(s) ds
// with w = |xi| and sin(w t)/w -> t at xi = 0.
struct DuhamelWeights {
  double window = -1.0;
  int n = 0;
  double length = 0.0;
  std::array<double, kTargets> times{};
  std::vector<double> sin_w, cos_w;  // [(j * kNodes + q) * size + k]

  void rebuild(const SpectralGrid& g, double T) {
    window = T;
    n = g.n();
    length = g.length();
    std::array<double, kNodes> nodes{};
    for (int q = 0; q < kNodes; ++q) nodes[static_cast<std::size_t>(q)] = 0.5 * T * (1.0 + kGaussNodes[q]);
    for (int j = 0; j < kNodes; ++j) times[static_cast<std::size_t>(j)] = nodes[static_cast<std::size_t>(j)];
    times[kNodes] = T;

    const auto lagrange = [&](int q, double s) {
      double v = 1.0;
      for (int r = 0; r < kNodes; ++r)
        if (r != q) v *= (s - nodes[static_cast<std::size_t>(r)]) / (nodes[static_cast<std::size_t>(q)] - nodes[static_cast<std::size_t>(r)]);
      return v;
    };

    const int sub = 16 + static_cast<int>(std::ceil(g.max_wavenumber() * T));
    std::vector<double> gx, gw;
    gauss_legendre(sub, gx, gw);

    const std::size_t size = g.size();
    sin_w.assign(static_cast<std::size_t>(kTargets * kNodes) * size, 0.0);
    cos_w.assign(static_cast<std::size_t>(kTargets * kNodes) * size, 0.0);
    const auto k2 = g.wavenumber_sq();

    // Weights depend on |xi| only; cache by distinct |xi|^2.
    std::vector<std::pair<double, std::size_t>> order(size);
    for (std::size_t k = 0; k < size; ++k) order[k] = {k2[k], k};
    std::sort(order.begin(), order.end());

    std::vector<double> ls(static_cast<std::size_t>(sub * kNodes));
    for (int j = 0; j < kTargets; ++j) {
      const double tj = times[static_cast<std::size_t>(j)];
      std::vector<double> s(static_cast<std::size_t>(sub)), ws(static_cast<std::size_t>(sub));
      for (int p = 0; p < sub; ++p) {
        s[static_cast<std::size_t>(p)] = 0.5 * tj * (1.0 + gx[static_cast<std::size_t>(p)]);
        ws[static_cast<std::size_t>(p)] = 0.5 * tj * gw[static_cast<std::size_t>(p)];
        for (int q = 0; q < kNodes; ++q) ls[static_cast<std::size_t>(p * kNodes + q)] = lagrange(q, s[static_cast<std::size_t>(p)]);
      }
      double last_k2 = -1.0;
      std::array<double, kNodes> sw{}, cw{};
      for (const auto& [kk, k] : order) {
        if (kk != last_k2) {
          last_k2 = kk;
          const double w = std::sqrt(kk);
          sw.fill(0.0);
          cw.fill(0.0);
          for (int p = 0; p < sub; ++p) {
            const double arg = w * (tj - s[static_cast<std::size_t>(p)]);
            const double ks = w == 0.0 ? (tj - s[static_cast<std::size_t>(p)]) : std::sin(arg) / w;
            const double kc = std::cos(arg);
            for (int q = 0; q < kNodes; ++q) {
              const double lw = ws[static_cast<std::size_t>(p)] * ls[static_cast<std::size_t>(p * kNodes + q)];
              sw[static_cast<std::size_t>(q)] += ks * lw;
              cw[static_cast<std::size_t>(q)] += kc * lw;
            }
          }
        }
        for (int q = 0; q < kNodes; ++q) {
          const std::size_t base = static_cast<std::size_t>(j * kNodes + q) * size;
          sin_w[base + k] = sw[static_cast<std::size_t>(q)];
          cos_w[base + k] = cw[static_cast<std::size_t>(q)];
        }
      }
    }
  }

  bool matches(const SpectralGrid& g, double T) const { return T == window && g.n() == n && g.length() == length; }
};

using SpectralVec = std::array<Spectrum, 3>;

double sobolev3(const SpectralVec& s, double exponent) {
  double acc = 0.0;
  for (const auto& c : s) acc += std::pow(spectral::sobolev_norm(c, exponent), 2);
  return std::sqrt(acc);
}

SpectralVec difference(const SpectralVec& a, const SpectralVec& b) {
  SpectralVec d = a;
  for (int c = 0; c < 3; ++c) kernels::parallel::axpy(cplx(-1.0), b[c].coeffs(), d[c].coeffs());
  return d;
}

}  // namespace

DuhamelStep duhamel_step(const WaveState& state, double b, const FixedPointParams& params,
                         const DuhamelOptions& opts) {
  if (!(params.T_step > 0.0)) throw std::invalid_argument("contraction window must be positive");
  if (!(params.contraction_tol > 0.0)) throw std::invalid_argument("contraction tolerance must be positive");
  const auto& g = state.U.grid();
  const GridPtr& grid = state.U.grid_ptr();
  thread_local DuhamelWeights weights;
  if (!weights.matches(g, params.T_step)) weights.rebuild(g, params.T_step);

  const std::size_t size = g.size();
  const auto k2 = g.wavenumber_sq();
  const SpectralVec U0 = forward3(deviation_from_north(state.U));
  const SpectralVec V0 = forward3(state.V);

  // Free evolution of the initial data at every target time.
  std::vector<SpectralVec> freeU(kTargets, U0), freeV(kTargets, V0);
  for (int j = 0; j < kTargets; ++j) {
    const double t = weights.times[static_cast<std::size_t>(j)];
    auto& fu = freeU[static_cast<std::size_t>(j)];
    auto& fv = freeV[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < size; ++k) {
      const double w = std::sqrt(k2[k]);
      const double cw = std::cos(w * t);
      const double sw = w == 0.0 ? t : std::sin(w * t) / w;
      for (int c = 0; c < 3; ++c) {
        const cplx u0 = U0[c].coeffs()[k], v0 = V0[c].coeffs()[k];
        fu[c].coeffs()[k] = cw * u0 + sw * v0;
        fv[c].coeffs()[k] = -w * w * sw * u0 + cw * v0;
      }
    }
  }

  std::vector<SpectralVec> iterU = freeU, iterV = freeV;
  DuhamelTrace trace;

  int growth_streak = 0;
  bool converged = false;
  for (int sweep = 0; sweep < params.max_iter; ++sweep) {
    // Nonlinearity at the collocation nodes of the current iterate.
    std::vector<SpectralVec> Fhat;
    Fhat.reserve(kNodes);
    for (int q = 0; q < kNodes; ++q) {
      if (opts.zero_nonlinearity) {
        Fhat.push_back({Spectrum(grid), Spectrum(grid), Spectrum(grid)});
        continue;
      }
      Vector3Field Uq = inverse3(iterU[static_cast<std::size_t>(q)]);
      Uq.shift(kNorth);
      const Vector3Field Vq = inverse3(iterV[static_cast<std::size_t>(q)]);
      SpectralVec Fq = forward3(f_delta(Uq, Vq, state.delta, b, false));
      if (opts.dealias)
        for (auto& c : Fq) spectral::dealias(c);
      Fhat.push_back(std::move(Fq));
    }

    double distance = 0.0;
    for (int j = 0; j < kTargets; ++j) {
      const auto js = static_cast<std::size_t>(j);
      SpectralVec newU = freeU[js], newV = freeV[js];
      for (int c = 0; c < 3; ++c) {
        auto u = newU[c].coeffs();
        auto v = newV[c].coeffs();
        for (int q = 0; q < kNodes; ++q) {
          const std::size_t base = static_cast<std::size_t>(j * kNodes + q) * size;
          const auto f = Fhat[static_cast<std::size_t>(q)][c].coeffs();
          const double* sw = weights.sin_w.data() + base;
          const double* cw = weights.cos_w.data() + base;
          for (std::size_t k = 0; k < size; ++k) {
            u[k] += sw[k] * f[k];
            v[k] += cw[k] * f[k];
          }
        }
      }
      const double d = sobolev3(difference(newU, iterU[js]), kContractionSobolevIndex) +
                       sobolev3(difference(newV, iterV[js]), kContractionSobolevIndex - 1.0);
      distance = std::max(distance, d);
      const double ball = sobolev3(difference(newU, U0), kContractionSobolevIndex) +
                          sobolev3(newV, kContractionSobolevIndex - 1.0);
      trace.max_ball_distance = std::max(trace.max_ball_distance, ball);
      iterU[js] = std::move(newU);
      iterV[js] = std::move(newV);
    }
    if (!std::isfinite(distance)) throw NonFinite("non-finite iterate in Duhamel fixed-point map");
    if (!trace.distances.empty() && distance > trace.distances.back())
      ++growth_streak;
    else
      growth_streak = 0;
    trace.distances.push_back(distance);
    if (growth_streak >= 2) throw NoContraction("Duhamel iterates diverge (distance grew on two consecutive sweeps)");
    if (distance < params.contraction_tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NoContraction("Duhamel map did not contract to " + std::to_string(params.contraction_tol) + " within " +
                        std::to_string(params.max_iter) + " sweeps");
  if (params.M > 0.0) trace.ball_ok = trace.max_ball_distance <= params.M;

  Vector3Field Uend = inverse3(iterU[kNodes]);
  Uend.shift(kNorth);
  Vector3Field Vend = inverse3(iterV[kNodes]);
  if (!all_finite(Uend) || !all_finite(Vend)) throw NonFinite("non-finite state after Duhamel step");
  trace.pre_projection_violation = max_unit_violation(Uend);
  WaveState next{project_to_sphere(Uend), std::move(Vend), state.delta, state.t_scaled + params.T_step};
  return {std::move(next), std::move(trace)};
}

// ---------------------------------------------------------------------------
// Driver

namespace {

// Trapezoid rule for int_0^t l2_growth_rhs, advanced on every step.
struct GrowthIntegral {
  double b;
  double t = 0.0, rate = 0.0, value = 0.0;
  void start(const SphereField& u) { rate = l2_growth_rhs(u, b); }
  void advance(const SphereField& u, double t_new) {
    const double r = l2_growth_rhs(u, b);
    value += 0.5 * (t_new - t) * (rate + r);
    rate = r;
    t = t_new;
  }
};

void record(EvolveResult& result, const SphereField& u, double b, double t, const std::vector<double>& exps,
            const GrowthIntegral& integral) {
  DiagnosticsRecord rec = diagnose(u, b, t, exps);
  rec.l2_rhs_integral = integral.value;
  result.diagnostics.push_back(std::move(rec));
}

}  // namespace

EvolveResult evolve(const SphereField& u0, const EvolveOptions& opts, const StepObserver& observer) {
  if (!(opts.T >= 0.0)) throw std::invalid_argument("end time must be nonnegative");
  if (opts.diag_every < 1) throw std::invalid_argument("diag_every must be >= 1");
  EvolveResult result{u0, {}, {}};
  GrowthIntegral integral{opts.b};
  integral.start(u0);
  record(result, u0, opts.b, 0.0, opts.sobolev_exponents, integral);
  if (observer) observer(u0, 0.0, 0);

  const double eps_t = 1e-12 * std::max(1.0, opts.T);
  if (opts.scheme == Scheme::rk4) {
    if (!(opts.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const Rk4Options rk{opts.dealias, opts.stability_factor};
    SphereField u = u0;
    double t = 0.0;
    std::size_t step = 0;
    while (t < opts.T - eps_t) {
      const double h = std::min(opts.dt, opts.T - t);
      Rk4Step next = rk4_step_report(u, opts.b, h, rk);
      u = std::move(next.u);
      t = (h == opts.dt) ? (step + 1) * opts.dt : opts.T;
      ++step;
      result.stats.max_pre_projection_violation =
          std::max(result.stats.max_pre_projection_violation, next.pre_projection_violation);
      result.stats.max_post_projection_violation =
          std::max(result.stats.max_post_projection_violation, max_unit_violation(u.vec()));
      integral.advance(u, t);
      if (observer) observer(u, t, step);
      const bool last = !(t < opts.T - eps_t);
      if (step % static_cast<std::size_t>(opts.diag_every) == 0 || last)
        record(result, u, opts.b, t, opts.sobolev_exponents, integral);
    }
    result.stats.steps = step;
    result.u = std::move(u);
    return result;
  }

  // Regularized scheme: scaled time tau = t / delta.
  if (!(opts.delta > 0.0)) throw std::invalid_argument("delta must be positive");
  WaveState state{u0, opts.initial_velocity.value_or(Vector3Field(u0.grid_ptr())), opts.delta, 0.0};
  const double tau_end = opts.T / opts.delta;
  const double eps_tau = 1e-12 * std::max(1.0, tau_end);
  std::size_t step = 0;
  while (state.t_scaled < tau_end - eps_tau) {
    const double size = wave_state_size(state);
    FixedPointParams params;
    params.T_step = std::min(opts.C0 * opts.delta / ((size + 1.0) * (size + 1.0)), tau_end - state.t_scaled);
    params.M = opts.C1 * size;
    params.max_iter = opts.max_iter;
    params.contraction_tol = opts.contraction_tol;
    DuhamelStep next = duhamel_step(state, opts.b, params, DuhamelOptions{opts.dealias, false});
    const bool last = !(next.state.t_scaled < tau_end - eps_tau);
    if (last) next.state.t_scaled = tau_end;
    state = std::move(next.state);
    ++step;
    auto& st = result.stats;
    st.max_pre_projection_violation = std::max(st.max_pre_projection_violation, next.trace.pre_projection_violation);
    st.max_post_projection_violation = std::max(st.max_post_projection_violation, max_unit_violation(state.U.vec()));
    st.max_contraction_ratio = std::max(st.max_contraction_ratio, next.trace.max_ratio());
    st.max_ball_distance = std::max(st.max_ball_distance, next.trace.max_ball_distance);
    if (size > 0.0) st.max_ball_ratio = std::max(st.max_ball_ratio, next.trace.max_ball_distance / size);
    st.max_sweeps = std::max(st.max_sweeps, static_cast<int>(next.trace.distances.size()));
    if (!next.trace.ball_ok)
      throw NoContraction("Duhamel iterate left the ball W_{T,M} (distance " +
                          std::to_string(next.trace.max_ball_distance) + " > M = " + std::to_string(params.M) + ")");
    const double t = state.physical_time();
    integral.advance(state.U, t);
    if (observer) observer(state.U, t, step);
    if (step % static_cast<std::size_t>(opts.diag_every) == 0 || last)
      record(result, state.U, opts.b, t, opts.sobolev_exponents, integral);
  }
  result.stats.steps = step;
  result.u = state.U;
  return result;
}

}  // namespace helilab
