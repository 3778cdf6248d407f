#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "helilab/fields.hpp"
#include "helilab/spectral.hpp"

namespace helilab::testing {

inline constexpr double kPi = std::numbers::pi;

/// Real trigonometric polynomial with integer modes |m| <= mmax and a
/// nonzero mean, drawn from a fixed seed.
inline ScalarField random_band_limited(const GridPtr& g, unsigned seed, int mmax = 4) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  struct Term {
    int m1, m2;
    double a, b;
  };
  std::vector<Term> terms;
  for (int m1 = -mmax; m1 <= mmax; ++m1)
    for (int m2 = 0; m2 <= mmax; ++m2) terms.push_back({m1, m2, nd(rng), nd(rng)});
  const double k = 2.0 * kPi / g->length();
  return sample(g, [&](double x1, double x2) {
    double s = 0.3;
    for (const auto& t : terms) {
      const double ph = k * (t.m1 * x1 + t.m2 * x2);
      s += (t.a * std::cos(ph) + t.b * std::sin(ph)) / (1.0 + t.m1 * t.m1 + t.m2 * t.m2);
    }
    return s;
  });
}

/// Smooth sphere field u = Pi(k + eps (f1, f2, f3)) with band-limited f.
inline SphereField random_sphere_field(const GridPtr& g, unsigned seed, double eps = 0.4) {
  Vector3Field y(g, kNorth);
  for (int c = 0; c < 3; ++c) y[c].add_scaled(eps, random_band_limited(g, seed + 17u * c, 3));
  return project_to_sphere(y);
}

inline double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_diff(const ComplexScalarField& a, const ComplexScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_diff(const Vector3Field& a, const Vector3Field& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, max_diff(a[c], b[c]));
  return m;
}

/// Parallel transport of xi along the minimal arc from a to b by integrating
/// F' = -(F . g') g over the slerp curve g with `steps` classical RK4 steps.
inline Vec3 transport_ode(const Vec3& a, const Vec3& b, const Vec3& xi, int steps) {
  auto dot = [](const Vec3& p, const Vec3& q) { return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]; };
  // Unit-speed-in-s curve through an orthonormal pair (a, e) of the arc's plane.
  Vec3 e{b[0] - dot(a, b) * a[0], b[1] - dot(a, b) * a[1], b[2] - dot(a, b) * a[2]};
  const double ne = std::sqrt(dot(e, e));
  for (auto& x : e) x /= ne;
  const double theta = std::atan2(ne, dot(a, b));
  auto gamma = [&](double s) {
    const double c = std::cos(s * theta), sn = std::sin(s * theta);
    return Vec3{c * a[0] + sn * e[0], c * a[1] + sn * e[1], c * a[2] + sn * e[2]};
  };
  auto velocity = [&](double s) {
    const double c = std::cos(s * theta), sn = std::sin(s * theta);
    return Vec3{theta * (-sn * a[0] + c * e[0]), theta * (-sn * a[1] + c * e[1]), theta * (-sn * a[2] + c * e[2])};
  };
  auto rhs = [&](double s, const Vec3& F) {
    const Vec3 g = gamma(s);
    const double f = dot(F, velocity(s));
    return Vec3{-f * g[0], -f * g[1], -f * g[2]};
  };
  Vec3 F = xi;
  const double h = 1.0 / steps;
  auto axpy = [](const Vec3& x, double t, const Vec3& y) { return Vec3{x[0] + t * y[0], x[1] + t * y[1], x[2] + t * y[2]}; };
  for (int i = 0; i < steps; ++i) {
    const double s = i * h;
    const Vec3 k1 = rhs(s, F);
    const Vec3 k2 = rhs(s + 0.5 * h, axpy(F, 0.5 * h, k1));
    const Vec3 k3 = rhs(s + 0.5 * h, axpy(F, 0.5 * h, k2));
    const Vec3 k4 = rhs(s + h, axpy(F, h, k3));
    for (int c = 0; c < 3; ++c) F[c] += h / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
  }
  return F;
}

inline ScalarField mean_free(ScalarField f) {
  const double m = spectral::mean(f);
  for (auto& x : f.values()) x -= m;
  return f;
}

}  // namespace helilab::testing
