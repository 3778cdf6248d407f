#include "helilab/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "helilab/errors.hpp"

namespace helilab {

namespace {

const cplx kI(0.0, 1.0);

using spectral::partial_derivative;

Axis axis_of(int m) { return m == 0 ? Axis::x1 : Axis::x2; }

ComplexScalarField tangent_to_complex(const Vector3Field& x, const Vector3Field& v, const Vector3Field& w) {
  const ScalarField re = dot(x, v);
  const ScalarField im = dot(x, w);
  ComplexScalarField out(x.grid_ptr());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = cplx(re[i], im[i]);
  return out;
}

ComplexScalarField multiply(const ScalarField& a, const ComplexScalarField& b) {
  ComplexScalarField out = b;
  kernels::parallel::multiply(out.values(), a.values());
  return out;
}

/// Im(a conj b).
ScalarField im_product(const ComplexScalarField& a, const ComplexScalarField& b) {
  ScalarField out(a.grid_ptr());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::imag(a[i] * std::conj(b[i]));
  return out;
}

double max_abs_vec(const Vector3Field& x) {
  double m = 0.0;
  for (const auto& c : x.components()) m = std::max(m, spectral::max_abs(c));
  return m;
}

double max_abs_diff(const Vector3Field& a, const Vector3Field& b) { return max_abs_vec(a - b); }

// d[l][m] = d_l psi_m, lap[m] = Laplace psi_m; one forward transform per component.
struct PsiDerivatives {
  std::array<std::array<ComplexScalarField, 2>, 2> d;
  std::array<ComplexScalarField, 2> lap;
};

PsiDerivatives psi_derivatives(const ComplexPairField& psi) {
  const auto& grid = psi[0].grid_ptr();
  PsiDerivatives out{{{{ComplexScalarField(grid), ComplexScalarField(grid)},
                       {ComplexScalarField(grid), ComplexScalarField(grid)}}},
                     {ComplexScalarField(grid), ComplexScalarField(grid)}};
  for (std::size_t m = 0; m < 2; ++m) {
    const Spectrum s = spectral::forward(psi[m]);
    for (int l = 0; l < 2; ++l) {
      Spectrum sl = s;
      spectral::differentiate(sl, axis_of(l));
      out.d[static_cast<std::size_t>(l)][m] = spectral::inverse_complex(sl);
    }
    Spectrum sl = s;
    spectral::laplacian(sl);
    out.lap[m] = spectral::inverse_complex(sl);
  }
  return out;
}

// du[m][l] = d_m u_l for l = 1, 2.
std::array<std::array<ScalarField, 2>, 2> planar_derivatives(const Vector3Field& u) {
  const auto& grid = u.grid_ptr();
  std::array<std::array<ScalarField, 2>, 2> du{{{ScalarField(grid), ScalarField(grid)},
                                                {ScalarField(grid), ScalarField(grid)}}};
  const auto s = spectral::forward_pair(u[0], u[1]);
  for (int m = 0; m < 2; ++m) {
    Spectrum s0 = s[0], s1 = s[1];
    spectral::differentiate(s0, axis_of(m));
    spectral::differentiate(s1, axis_of(m));
    auto d = spectral::inverse_real_pair(s0, s1);
    du[static_cast<std::size_t>(m)] = {std::move(d[0]), std::move(d[1])};
  }
  return du;
}

ComplexScalarField psi0_from(const ComplexPairField& psi, const PsiDerivatives& pd, const std::array<ScalarField, 2>& A,
                             const Vector3Field& u, double b) {
  ComplexScalarField out(psi[0].grid_ptr());
  for (std::size_t i = 0; i < out.size(); ++i) {
    cplx acc = 0.0;
    for (std::size_t l = 0; l < 2; ++l) {
      acc += -kI * (pd.d[l][l][i] + kI * A[l][i] * psi[l][i]);
      acc -= b * u[static_cast<int>(l)][i] * psi[l][i];
    }
    out[i] = acc;
  }
  return out;
}

ComplexScalarField psi0_impl(const ComplexPairField& psi, const std::array<ScalarField, 2>& A, const Vector3Field& u,
                             double b) {
  ComplexScalarField out(psi[0].grid_ptr());
  for (int l = 0; l < 2; ++l) {
    const auto ls = static_cast<std::size_t>(l);
    out.add_scaled(-kI, covariant_derivative(psi[ls], A[ls], axis_of(l)));
    out.add_scaled(cplx(-b), multiply(u[l], psi[ls]));
  }
  return out;
}

std::array<ScalarField, 2> tilde_connection(const std::array<ScalarField, 2>& A, const Vector3Field& u, double b) {
  std::array<ScalarField, 2> At = A;
  At[0].add_scaled(-0.5 * b, u[0]);
  At[1].add_scaled(-0.5 * b, u[1]);
  return At;
}

// -i sum_l D~_l D~_l psi_m + N_m, with D~_l D~_l expanded as
// d_l d_l + 2 i A~_l d_l + i (d_l A~_l) - A~_l^2.
ComplexPairField msm_rhs_impl(const ComplexPairField& psi, const PsiDerivatives& pd,
                              const std::array<ScalarField, 2>& At, const ScalarField& div_At,
                              const std::array<std::array<ScalarField, 2>, 2>& du, const Vector3Field& u, double b) {
  const auto& grid = psi[0].grid_ptr();
  const std::size_t size = grid->size();
  ComplexPairField out{ComplexScalarField(grid), ComplexScalarField(grid)};
  for (std::size_t m = 0; m < 2; ++m) {
    const ComplexScalarField& p = psi[m];
    auto& o = out[m];
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < size; ++i) {
      cplx dd = pd.lap[m][i] + kI * div_At[i] * p[i];
      cplx nm = 0.0;
      for (std::size_t l = 0; l < 2; ++l) {
        dd += 2.0 * kI * At[l][i] * pd.d[l][m][i] - At[l][i] * At[l][i] * p[i];
        const double ul = u[static_cast<int>(l)][i];
        nm += b * (0.5 * du[l][l][i] * p[i] - kI * (0.25 * b) * ul * ul * p[i] - du[m][l][i] * psi[l][i]);
        nm += std::imag(p[i] * std::conj(psi[l][i])) * psi[l][i];
      }
      o[i] = -kI * dd + nm;
    }
  }
  return out;
}

Vector3Field combine(const ScalarField& a, const Vector3Field& x, const ScalarField& c, const Vector3Field& y) {
  Vector3Field out(x.grid_ptr());
  for (int k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < out.size(); ++i) out[k][i] = a[i] * x[k][i] + c[i] * y[k][i];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Frames

Vector3Field normalize_against(const Vector3Field& U, const Vector3Field& V) {
  const ScalarField uv = dot(U, V);
  Vector3Field y = U;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < y.size(); ++i) y[c][i] -= uv[i] * V[c][i];
  Vector3Field out(U.grid_ptr());
  const auto rep = kernels::parallel::normalize(y.view(), out.view());
  if (!(rep.min_norm > kDegenerateNorm)) throw DegeneratePoint(rep.argmin, rep.min_norm, "normalize_against");
  return out;
}

Frame build_frame(const SphereField& u, int homotopy_steps) {
  if (homotopy_steps < 1) throw std::invalid_argument("homotopy_steps must be >= 1");
  const auto& grid = u.grid_ptr();
  {
    double closest = std::numeric_limits<double>::infinity();
    std::size_t where = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = 1.0 + u[2][i];
      if (d < closest) {
        closest = d;
        where = i;
      }
    }
    if (!(closest > kDegenerateNorm))
      throw DegeneratePoint(where, closest, "build_frame (u reaches -k, the linear homotopy is undefined)");
  }

  Vector3Field v(grid, kFrameE1);
  for (int j = homotopy_steps - 1; j >= 0; --j) {
    const double alpha = static_cast<double>(j) / homotopy_steps;
    Vector3Field H = u.vec();
    if (j > 0) {
      H *= 1.0 - alpha;
      H.shift({alpha * kNorth[0], alpha * kNorth[1], alpha * kNorth[2]});
      H = project_to_sphere(H).vec();
    }
    const double overlap = spectral::max_abs(dot(v, H));
    if (!(overlap < kChainTol))
      throw HomotopyTooCoarse("frame chaining at alpha = " + std::to_string(alpha) + " has |v . H| = " +
                              std::to_string(overlap) + " >= 2^-5; increase homotopy_steps (currently " +
                              std::to_string(homotopy_steps) + ")");
    v = normalize_against(v, H);
  }
  Vector3Field w = cross(u.vec(), v);
  return {std::move(v), std::move(w)};
}

FrameReport frame_report(const SphereField& u, const Frame& f, double boundary_margin) {
  FrameReport r;
  r.unit = std::max(max_unit_violation(f.v), max_unit_violation(f.w));
  r.tangency = std::max({spectral::max_abs(dot(f.v, f.w)), spectral::max_abs(dot(f.v, u.vec())),
                         spectral::max_abs(dot(f.w, u.vec()))});
  r.orientation = max_abs_diff(cross(u.vec(), f.v), f.w);
  r.boundary = std::max(boundary_deviation(f.v, kFrameE1, boundary_margin),
                        boundary_deviation(f.w, kFrameE2, boundary_margin));
  return r;
}

Frame rotate_frame(const Frame& f, const ScalarField& chi) {
  ScalarField c(chi.grid_ptr()), s(chi.grid_ptr()), ms(chi.grid_ptr());
  for (std::size_t i = 0; i < chi.size(); ++i) {
    c[i] = std::cos(chi[i]);
    s[i] = std::sin(chi[i]);
    ms[i] = -s[i];
  }
  return {combine(c, f.v, s, f.w), combine(ms, f.v, c, f.w)};
}

Frame rotate_frame(const Frame& f, double chi0) { return rotate_frame(f, ScalarField(f.v.grid_ptr(), chi0)); }

std::array<ScalarField, 2> connection(const Frame& f) {
  const auto dv = gradient(f.v);
  return {dot(dv[0], f.w), dot(dv[1], f.w)};
}

ScalarField divergence(const std::array<ScalarField, 2>& a) {
  ScalarField d = partial_derivative(a[0], Axis::x1);
  d += partial_derivative(a[1], Axis::x2);
  return d;
}

Frame coulomb_fix(const SphereField&, const Frame& frame) {
  constexpr int kMaxRounds = 8;
  constexpr double kFloor = 1e-13;
  Frame best = frame;
  ScalarField div = divergence(connection(best));
  double best_err = spectral::max_abs(div);
  for (int round = 0; round < kMaxRounds && best_err > kFloor; ++round) {
    ScalarField rhs = div;
    rhs *= -1.0;
    const ScalarField chi = spectral::inverse_laplacian(rhs);
    Frame cand = rotate_frame(best, chi);
    ScalarField cand_div = divergence(connection(cand));
    const double err = spectral::max_abs(cand_div);
    if (!(err < best_err)) break;
    const bool keep_going = err < 0.5 * best_err;
    best = std::move(cand);
    div = std::move(cand_div);
    best_err = err;
    if (!keep_going) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Differentiated fields

ComplexScalarField covariant_derivative(const ComplexScalarField& f, const ScalarField& a, Axis axis) {
  ComplexScalarField d = partial_derivative(f, axis);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += kI * a[i] * f[i];
  return d;
}

std::array<ScalarField, 2> connection_from_psi(const ComplexPairField& psi) {
  const Spectrum omega = spectral::forward(im_product(psi[0], psi[1]));
  Spectrum s1 = omega, s2 = omega;
  spectral::inverse_gradient_riesz(s1, Axis::x2);
  spectral::inverse_gradient_riesz(s2, Axis::x1);
  ScalarField a2 = spectral::inverse_real(s2);
  a2 *= -1.0;
  return {spectral::inverse_real(s1), std::move(a2)};
}

ScalarField temporal_connection(const ComplexScalarField& psi0, const ComplexPairField& psi) {
  Spectrum s = spectral::forward(im_product(psi0, psi[0]));
  spectral::inverse_gradient_riesz(s, Axis::x1);
  Spectrum s2 = spectral::forward(im_product(psi0, psi[1]));
  spectral::inverse_gradient_riesz(s2, Axis::x2);
  s += s2;
  return spectral::inverse_real(s);
}

ComplexScalarField psi0_from_spatial(const ComplexPairField& psi, const std::array<ScalarField, 2>& A,
                                     const SphereField& u, double b) {
  return psi0_impl(psi, A, u.vec(), b);
}

GaugeData extract_gauge(const SphereField& u, const Frame& frame, double b, const std::optional<Vector3Field>& ut) {
  const auto du = gradient(u.vec());
  ComplexPairField psi{tangent_to_complex(du[0], frame.v, frame.w), tangent_to_complex(du[1], frame.v, frame.w)};
  std::array<ScalarField, 2> A = connection(frame);
  std::array<double, 2> A_mean{spectral::mean(A[0]), spectral::mean(A[1])};
  ComplexScalarField psi0 = psi0_impl(psi, A, u.vec(), b);
  ComplexScalarField psi0_time = tangent_to_complex(ut ? *ut : ll_rhs(u, b), frame.v, frame.w);
  ScalarField A0 = temporal_connection(psi0, psi);
  std::array<ScalarField, 2> At = tilde_connection(A, u.vec(), b);
  return {std::move(psi), std::move(psi0), std::move(psi0_time), std::move(A), A_mean, std::move(A0), std::move(At), b};
}

std::map<std::string, double> verify_relations(const SphereField& u, const Frame& frame, const GaugeData& g) {
  std::map<std::string, double> r;
  const auto du = gradient(u.vec());
  const auto dv = gradient(frame.v);
  const auto dw = gradient(frame.w);
  for (int m = 0; m < 2; ++m) {
    const auto ms = static_cast<std::size_t>(m);
    const auto& p = g.psi[ms];
    ScalarField re(p.grid_ptr()), im(p.grid_ptr());
    for (std::size_t i = 0; i < p.size(); ++i) {
      re[i] = p[i].real();
      im[i] = p[i].imag();
    }
    ScalarField mre = re, mim = im, mA = g.A[ms];
    mre *= -1.0;
    mim *= -1.0;
    mA *= -1.0;
    const std::string idx = std::to_string(m + 1);
    r["du_frame_" + idx] = max_abs_diff(du[ms], combine(re, frame.v, im, frame.w));
    r["dv_frame_" + idx] = max_abs_diff(dv[ms], combine(mre, u.vec(), g.A[ms], frame.w));
    r["dw_frame_" + idx] = max_abs_diff(dw[ms], combine(mim, u.vec(), mA, frame.v));
  }
  {
    ComplexScalarField g1 = covariant_derivative(g.psi[1], g.A[0], Axis::x1);
    g1 -= covariant_derivative(g.psi[0], g.A[1], Axis::x2);
    r["psi_compatibility"] = spectral::max_abs(g1);
  }
  {
    ScalarField g2 = partial_derivative(g.A[1], Axis::x1);
    g2 -= partial_derivative(g.A[0], Axis::x2);
    g2 -= im_product(g.psi[0], g.psi[1]);
    r["curvature"] = spectral::max_abs(g2);
  }
  r["div_A"] = spectral::max_abs(divergence(g.A));
  {
    const auto riesz = connection_from_psi(g.psi);
    double worst = 0.0;
    for (std::size_t m = 0; m < 2; ++m) {
      ScalarField d = g.A[m];
      d -= riesz[m];
      for (double& x : d.values()) x -= g.A_mean[m];
      worst = std::max(worst, spectral::max_abs(d));
    }
    r["A_riesz"] = worst;
  }
  r["psi0_routes"] = spectral::max_abs(g.psi0 - g.psi0_time);
  return r;
}

ComplexPairField msm_rhs(const GaugeData& gauge, const SphereField& u, double b) {
  const auto At = tilde_connection(gauge.A, u.vec(), b);
  return msm_rhs_impl(gauge.psi, psi_derivatives(gauge.psi), At, divergence(At), planar_derivatives(u.vec()), u.vec(),
                      b);
}

ComplexPairField msm_rhs_covariant(const GaugeData& gauge, const SphereField& u, double b) {
  const auto& grid = gauge.psi[0].grid_ptr();
  ComplexPairField out{ComplexScalarField(grid), ComplexScalarField(grid)};
  ComplexScalarField ulpsi(grid);
  for (int l = 0; l < 2; ++l) ulpsi += multiply(u[l], gauge.psi[static_cast<std::size_t>(l)]);
  for (int m = 0; m < 2; ++m) {
    const auto ms = static_cast<std::size_t>(m);
    auto& o = out[ms];
    for (int l = 0; l < 2; ++l) {
      const auto ls = static_cast<std::size_t>(l);
      const auto inner = covariant_derivative(gauge.psi[ms], gauge.A[ls], axis_of(l));
      o.add_scaled(-kI, covariant_derivative(inner, gauge.A[ls], axis_of(l)));
      o.add_scaled(1.0, multiply(im_product(gauge.psi[ms], gauge.psi[ls]), gauge.psi[ls]));
    }
    o.add_scaled(cplx(-b), covariant_derivative(ulpsi, gauge.A[ms], axis_of(m)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evolution

MsmState msm_initial_state(const SphereField& u0, const Frame& frame) {
  const auto du = gradient(u0.vec());
  const auto A = connection(frame);
  MsmState s{{tangent_to_complex(du[0], frame.v, frame.w), tangent_to_complex(du[1], frame.v, frame.w)},
             u0.vec(),
             frame.v,
             frame.w,
             {spectral::mean(A[0]), spectral::mean(A[1])},
             0.0};
  return s;
}

namespace {

struct MsmRate {
  ComplexPairField psi;
  Vector3Field u, v, w;
  std::array<double, 2> A_mean;
};

MsmRate msm_rate(const MsmState& s, double b) {
  std::array<ScalarField, 2> A = connection_from_psi(s.psi);
  for (std::size_t m = 0; m < 2; ++m)
    for (double& x : A[m].values()) x += s.A_mean[m];
  const PsiDerivatives pd = psi_derivatives(s.psi);
  const auto du = planar_derivatives(s.u);
  const ComplexScalarField psi0 = psi0_from(s.psi, pd, A, s.u, b);
  const ScalarField A0 = temporal_connection(psi0, s.psi);
  // A from the Riesz formula is divergence free, so div A~ = -(b/2) div(u1, u2).
  ScalarField div_At = du[0][0];
  div_At += du[1][1];
  div_At *= -0.5 * b;
  ComplexPairField dpsi = msm_rhs_impl(s.psi, pd, tilde_connection(A, s.u, b), div_At, du, s.u, b);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t i = 0; i < dpsi[m].size(); ++i) dpsi[m][i] -= kI * A0[i] * s.psi[m][i];

  ScalarField re(A0.grid_ptr()), im(A0.grid_ptr()), mre(A0.grid_ptr()), mim(A0.grid_ptr()), mA0 = A0;
  for (std::size_t i = 0; i < re.size(); ++i) {
    re[i] = psi0[i].real();
    im[i] = psi0[i].imag();
    mre[i] = -re[i];
    mim[i] = -im[i];
  }
  mA0 *= -1.0;
  return {std::move(dpsi), combine(re, s.v, im, s.w), combine(mre, s.u, A0, s.w), combine(mim, s.u, mA0, s.v),
          {spectral::mean(im_product(psi0, s.psi[0])), spectral::mean(im_product(psi0, s.psi[1]))}};
}

MsmState advance(const MsmState& s, const MsmRate& r, double h) {
  MsmState out = s;
  for (std::size_t m = 0; m < 2; ++m) out.psi[m].add_scaled(cplx(h), r.psi[m]);
  out.u.add_scaled(h, r.u);
  out.v.add_scaled(h, r.v);
  out.w.add_scaled(h, r.w);
  for (std::size_t m = 0; m < 2; ++m) out.A_mean[m] += h * r.A_mean[m];
  out.t += h;
  return out;
}

bool finite(const MsmState& s) {
  for (const auto& p : s.psi)
    for (const cplx& z : p.values())
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return all_finite(s.u) && all_finite(s.v) && all_finite(s.w);
}

MsmRecord msm_record(const MsmState& s) {
  MsmRecord rec;
  rec.t = s.t;
  rec.psi_l2 = std::hypot(spectral::l2_norm(s.psi[0]), spectral::l2_norm(s.psi[1]));
  const Frame f{s.v, s.w};
  const auto A = connection(f);
  rec.div_A = spectral::max_abs(divergence(A));
  const auto riesz = connection_from_psi(s.psi);
  for (std::size_t m = 0; m < 2; ++m) {
    ScalarField d = A[m];
    d -= riesz[m];
    const double mu = spectral::mean(d);
    for (double& x : d.values()) x -= mu;
    rec.frame_drift = std::max(rec.frame_drift, spectral::max_abs(d));
  }
  return rec;
}

}  // namespace

MsmResult msm_evolve(const MsmState& initial, double b, double T, double dt, int record_every) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(T >= 0.0)) throw std::invalid_argument("T must be nonnegative");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  MsmResult result{initial, {msm_record(initial)}};
  MsmState& s = result.state;
  const double t0 = initial.t;
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(T / dt - 1e-9)));
  for (std::size_t step = 1; step <= steps; ++step) {
    const double h = std::min(dt, t0 + T - s.t);
    const MsmRate k1 = msm_rate(s, b);
    const MsmRate k2 = msm_rate(advance(s, k1, 0.5 * h), b);
    const MsmRate k3 = msm_rate(advance(s, k2, 0.5 * h), b);
    const MsmRate k4 = msm_rate(advance(s, k3, h), b);
    MsmState next = advance(s, k1, h / 6.0);
    next = advance(next, k2, h / 3.0);
    next = advance(next, k3, h / 3.0);
    next = advance(next, k4, h / 6.0);
    next.t = t0 + static_cast<double>(step) * dt;
    if (step == steps) next.t = t0 + T;
    if (!finite(next)) throw NonFinite("non-finite value in MSM evolution at t = " + std::to_string(next.t));
    next.u = project_to_sphere(next.u).vec();
    next.v = normalize_against(next.v, next.u);
    next.w = cross(next.u, next.v);
    s = std::move(next);
    if (step % static_cast<std::size_t>(record_every) == 0 || step == steps) result.records.push_back(msm_record(s));
  }
  return result;
}

cplx align_phase(const ComplexPairField& a, const ComplexPairField& b) {
  cplx acc = 0.0;
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t i = 0; i < a[m].size(); ++i) acc += std::conj(a[m][i]) * b[m][i];
  const double r = std::abs(acc);
  return r > 0.0 ? acc / r : cplx(1.0);
}

double l2_distance(const ComplexPairField& a, const ComplexPairField& b) {
  return std::hypot(spectral::l2_norm(a[0] - b[0]), spectral::l2_norm(a[1] - b[1]));
}

}  // namespace helilab
