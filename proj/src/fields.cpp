#include "helilab/fields.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "helilab/errors.hpp"

namespace helilab {

DegeneratePoint::DegeneratePoint(std::size_t index, double magnitude, const std::string& where)
    : SolverError(where + ": degenerate point at grid index " + std::to_string(index) +
                  " (|y| = " + std::to_string(magnitude) + ")"),
      index_(index),
      magnitude_(magnitude) {}

// ---------------------------------------------------------------------------
// Vector3Field

Vector3Field::Vector3Field(GridPtr grid, Vec3 fill)
    : c_{ScalarField(grid, fill[0]), ScalarField(grid, fill[1]), ScalarField(grid, fill[2])} {}

Vector3Field::Vector3Field(ScalarField x, ScalarField y, ScalarField z) : c_{std::move(x), std::move(y), std::move(z)} {
  if (c_[0].grid_ptr() != c_[1].grid_ptr() || c_[0].grid_ptr() != c_[2].grid_ptr())
    throw std::invalid_argument("vector field components live on different grids");
}

void Vector3Field::set(std::size_t i, const Vec3& v) {
  c_[0][i] = v[0];
  c_[1][i] = v[1];
  c_[2][i] = v[2];
}

kernels::Vec3View Vector3Field::view() { return {c_[0].values(), c_[1].values(), c_[2].values()}; }

kernels::ConstVec3View Vector3Field::view() const {
  const auto& a = c_;
  return {a[0].values(), a[1].values(), a[2].values()};
}

Vector3Field& Vector3Field::operator+=(const Vector3Field& o) { return add_scaled(1.0, o); }
Vector3Field& Vector3Field::operator-=(const Vector3Field& o) { return add_scaled(-1.0, o); }

Vector3Field& Vector3Field::operator*=(double s) {
  for (auto& c : c_) c *= s;
  return *this;
}

Vector3Field& Vector3Field::add_scaled(double alpha, const Vector3Field& x) {
  for (int i = 0; i < 3; ++i) c_[static_cast<std::size_t>(i)].add_scaled(alpha, x[i]);
  return *this;
}

Vector3Field& Vector3Field::shift(const Vec3& v) {
  for (int i = 0; i < 3; ++i)
    for (auto& x : c_[static_cast<std::size_t>(i)].values()) x += v[static_cast<std::size_t>(i)];
  return *this;
}

// ---------------------------------------------------------------------------
// SphereField

SphereField SphereField::from_unit(Vector3Field v, double unit_tol) {
  const double viol = max_unit_violation(v);
  if (!(viol <= unit_tol))
    throw std::invalid_argument("field is not unit-sphere valued (max | |u| - 1 | = " + std::to_string(viol) + ")");
  return SphereField(std::move(v));
}

SphereField SphereField::constant(GridPtr grid, const Vec3& direction) {
  return project_to_sphere(Vector3Field(std::move(grid), direction));
}

SphereField project_to_sphere(const Vector3Field& y) {
  Vector3Field out(y.grid_ptr());
  const auto rep = kernels::parallel::normalize(y.view(), out.view());
  if (!(rep.min_norm > kDegenerateNorm)) throw DegeneratePoint(rep.argmin, rep.min_norm, "project_to_sphere");
  return SphereField(std::move(out));
}

Vector3Field cross(const Vector3Field& a, const Vector3Field& b) {
  Vector3Field out(a.grid_ptr());
  kernels::parallel::cross(a.view(), b.view(), out.view());
  return out;
}

Vector3Field cross(const Vector3Field& a, const Vec3& c) {
  return cross(a, Vector3Field(a.grid_ptr(), c));
}

ScalarField dot(const Vector3Field& a, const Vector3Field& b) {
  ScalarField out(a.grid_ptr());
  kernels::parallel::dot(a.view(), b.view(), out.values());
  return out;
}

std::array<Spectrum, 3> forward3(const Vector3Field& u) {
  auto p = spectral::forward_pair(u[0], u[1]);
  return {std::move(p[0]), std::move(p[1]), spectral::forward(u[2])};
}

Vector3Field inverse3(const std::array<Spectrum, 3>& s) {
  auto p = spectral::inverse_real_pair(s[0], s[1]);
  return Vector3Field(std::move(p[0]), std::move(p[1]), spectral::inverse_real(s[2]));
}

std::array<Vector3Field, 2> gradient(const Vector3Field& u) {
  const auto s = forward3(u);
  std::array<Spectrum, 3> d1 = s, d2 = s;
  for (int c = 0; c < 3; ++c) {
    spectral::differentiate(d1[static_cast<std::size_t>(c)], Axis::x1);
    spectral::differentiate(d2[static_cast<std::size_t>(c)], Axis::x2);
  }
  // The six inverse transforms are paired as (d1 u_0, d1 u_1), (d1 u_2, d2 u_2), (d2 u_0, d2 u_1).
  auto a = spectral::inverse_real_pair(d1[0], d1[1]);
  auto b = spectral::inverse_real_pair(d1[2], d2[2]);
  auto c = spectral::inverse_real_pair(d2[0], d2[1]);
  return {Vector3Field(std::move(a[0]), std::move(a[1]), std::move(b[0])),
          Vector3Field(std::move(c[0]), std::move(c[1]), std::move(b[1]))};
}

Vector3Field laplacian(const Vector3Field& u) {
  auto s = forward3(u);
  for (auto& c : s) spectral::laplacian(c);
  return inverse3(s);
}

Vector3Field dealias(const Vector3Field& u) {
  auto s = forward3(u);
  for (auto& c : s) spectral::dealias(c);
  return inverse3(s);
}

bool all_finite(const Vector3Field& u) {
  for (const auto& c : u.components())
    for (double v : c.values())
      if (!std::isfinite(v)) return false;
  return true;
}

Vector3Field deviation_from_north(const SphereField& u) {
  Vector3Field d = u.vec();
  return d.shift({-kNorth[0], -kNorth[1], -kNorth[2]});
}

double max_unit_violation(const Vector3Field& u) {
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Vec3 v = u.at(i);
    const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(r - 1.0));
  }
  return worst;
}

double max_tangency_residual(const SphereField& u, const Vector3Field& x) {
  return spectral::max_abs(dot(u.vec(), x));
}

double boundary_deviation(const Vector3Field& u, const Vec3& target, double margin) {
  const auto& g = u.grid();
  const double L = g.length();
  double worst = 0.0;
  for (int i1 = 0; i1 < g.n(); ++i1) {
    for (int i2 = 0; i2 < g.n(); ++i2) {
      const double x1 = g.coordinate(i1), x2 = g.coordinate(i2);
      const bool near_edge = x1 < margin || x1 > L - margin || x2 < margin || x2 > L - margin;
      if (!near_edge) continue;
      const Vec3 v = u.at(g.index(i1, i2));
      for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(v[c] - target[c]));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Landau-Lifshitz expressions

Vector3Field curl_term(const SphereField& u) {
  auto [d1, d2] = gradient(u.vec());
  ScalarField c3 = d1[1];
  c3 -= d2[0];
  return Vector3Field(d2[2], -1.0 * d1[2], std::move(c3));
}

Vector3Field ll_rhs(const SphereField& u, double b) { return ll_rhs(u.vec(), b); }

Vector3Field ll_rhs(const Vector3Field& u, double b) {
  const auto& g = u.grid();
  const std::array<Spectrum, 3> s = forward3(u);
  // Effective field h = -Laplace u + b curl u, assembled per mode.
  std::array<Spectrum, 3> h{Spectrum(u.grid_ptr()), Spectrum(u.grid_ptr()), Spectrum(u.grid_ptr())};
  const auto k2 = g.wavenumber_sq();
  const int n = g.n();
  const cplx I(0.0, 1.0);
#pragma omp parallel for schedule(static)
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      const std::size_t k = g.index(i1, i2);
      const double q1 = g.odd_wavenumber(i1), q2 = g.odd_wavenumber(i2);
      h[0][k] = k2[k] * s[0][k] + b * I * q2 * s[2][k];
      h[1][k] = k2[k] * s[1][k] - b * I * q1 * s[2][k];
      h[2][k] = k2[k] * s[2][k] + b * I * (q1 * s[1][k] - q2 * s[0][k]);
    }
  }
  return cross(u, inverse3(h));
}

double energy(const SphereField& u, double b) {
  auto [d1, d2] = gradient(u.vec());
  const auto& g = u.grid();
  ScalarField density(u.grid_ptr());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double grad_sq = 0.0;
    for (int c = 0; c < 3; ++c) grad_sq += d1[c][i] * d1[c][i] + d2[c][i] * d2[c][i];
    const double curl1 = d2[2][i], curl2 = -d1[2][i], curl3 = d1[1][i] - d2[0][i];
    const double helicity = u[0][i] * curl1 + u[1][i] * curl2 + u[2][i] * curl3;
    density[i] = 0.5 * grad_sq + 0.5 * b * helicity;
  }
  return spectral::integral(density);
}

double l2_dist_sq(const SphereField& u) {
  const Vector3Field d = deviation_from_north(u);
  double acc = 0.0;
  for (const auto& c : d.components()) {
    const double v = spectral::l2_norm(c);
    acc += v * v;
  }
  return acc;
}

L2IdentitySides l2_identity_sides(const SphereField& u, double b) {
  const Vector3Field rate = ll_rhs(u, b);
  const Vector3Field d = deviation_from_north(u);
  const double lhs = 2.0 * spectral::integral(dot(d, rate));
  return {lhs, l2_growth_rhs(u, b)};
}

double l2_growth_rhs(const SphereField& u, double b) {
  if (b == 0.0) return 0.0;
  const auto g3 = spectral::gradient(u[2]);
  ScalarField integrand(u.grid_ptr());
  for (std::size_t i = 0; i < integrand.size(); ++i) integrand[i] = u[0][i] * g3[0][i] + u[1][i] * g3[1][i];
  return 2.0 * b * spectral::integral(integrand);
}

double mollifier_symbol(double eta_xi) {
  const auto bump = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double t = 2.0 - eta_xi;  // 1 at eta_xi = 1, 0 at eta_xi = 2
  if (t >= 1.0) return 1.0;
  if (t <= 0.0) return 0.0;
  return bump(t) / (bump(t) + bump(1.0 - t));
}

SphereField mollify_initial_data(const SphereField& u0, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("mollifier width must be positive");
  const Vector3Field d = deviation_from_north(u0);
  Vector3Field y(u0.grid_ptr());
  for (int c = 0; c < 3; ++c) {
    Spectrum s = spectral::forward(d[c]);
    spectral::apply_symbol(s, [eta](double k1, double k2, int, int) {
      return cplx(mollifier_symbol(eta * std::sqrt(k1 * k1 + k2 * k2)));
    });
    y[c] = spectral::inverse_real(s);
  }
  y.shift(kNorth);
  return project_to_sphere(y);
}

double blowup_monitor(const SphereField& u, double eps0) {
  const Vector3Field d = deviation_from_north(u);
  return spectral::sobolev_norm(d.components(), 2.0 + eps0);
}

DiagnosticsRecord diagnose(const SphereField& u, double b, double t, std::span<const double> sobolev_exponents) {
  DiagnosticsRecord rec;
  rec.t = t;
  rec.energy = energy(u, b);
  rec.l2_dist_sq = l2_dist_sq(u);
  rec.l2_growth_rhs = l2_growth_rhs(u, b);
  rec.unit_violation = max_unit_violation(u.vec());
  const Vector3Field d = deviation_from_north(u);
  for (double s : sobolev_exponents) rec.hs_norms[s] = spectral::sobolev_norm(d.components(), s);
  return rec;
}

}  // namespace helilab
