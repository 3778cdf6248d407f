#include "helilab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "helilab/errors.hpp"

namespace helilab {

namespace {

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// sin(a theta) / sin(theta), continuous at theta = 0.
double sine_ratio(double a, double theta) { return a * sinc(a * theta) / sinc(theta); }

}  // namespace

double sphere_angle(const Vec3& a, const Vec3& b) {
  const Vec3 c = cross3(a, b);
  return std::atan2(std::sqrt(dot3(c, c)), dot3(a, b));
}

Vec3 slerp(const Vec3& a, const Vec3& b, double s) {
  if (s == 0.0) return a;
  if (s == 1.0) return b;
  const double theta = sphere_angle(a, b);
  const double ca = sine_ratio(1.0 - s, theta), cb = sine_ratio(s, theta);
  return {ca * a[0] + cb * b[0], ca * a[1] + cb * b[1], ca * a[2] + cb * b[2]};
}

Vec3 slerp_velocity(const Vec3& a, const Vec3& b, double s) {
  const double theta = sphere_angle(a, b);
  // d/ds sin(c theta)/sin(theta) = theta cos(c theta)/sin(theta)
  const double st = sinc(theta);
  const double ca = -std::cos((1.0 - s) * theta) / st, cb = std::cos(s * theta) / st;
  return {ca * a[0] + cb * b[0], ca * a[1] + cb * b[1], ca * a[2] + cb * b[2]};
}

Vec3 transport(const Vec3& a, const Vec3& b, const Vec3& xi) {
  // Rodrigues rotation about k = a x b (|k| = sin theta) taking a to b, applied to
  // all of R^3 so discretely non-tangent inputs are rotated rather than distorted.
  const Vec3 k = cross3(a, b);
  const double c = dot3(a, b);
  const Vec3 kx = cross3(k, xi);
  const double f = dot3(k, xi) / (1.0 + c);
  return {c * xi[0] + kx[0] + f * k[0], c * xi[1] + kx[1] + f * k[1], c * xi[2] + kx[2] + f * k[2]};
}

GeodesicPair GeodesicPair::create(SphereField start, SphereField end) {
  if (start.grid_ptr() != end.grid_ptr()) throw std::invalid_argument("geodesic endpoints live on different grids");
  double worst = 0.0;
  for (std::size_t i = 0; i < start.size(); ++i) worst = std::max(worst, sphere_angle(start.at(i), end.at(i)));
  if (!(worst < std::numbers::pi - kAntipodalMargin))
    throw AntipodalPoints("geodesic endpoints are antipodal (max angle " + std::to_string(worst) + ")");
  return GeodesicPair(std::move(start), std::move(end), worst);
}

SphereField geodesic_eval(const GeodesicPair& pair, double s) {
  if (s == 0.0) return pair.start();
  if (s == 1.0) return pair.end();
  Vector3Field out(pair.start().grid_ptr());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.set(k, slerp(pair.start().at(k), pair.end().at(k), s));
  }
  return SphereField::from_unit(std::move(out));
}

Vector3Field parallel_transport(const GeodesicPair& pair, const Vector3Field& xi) {
  Vector3Field out(xi.grid_ptr());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.set(k, transport(pair.start().at(k), pair.end().at(k), xi.at(k)));
  }
  return out;
}

DifferenceFunctional difference_functional(const SphereField& u0, const SphereField& u1) {
  const GeodesicPair pair = GeodesicPair::create(u0, u1);
  DifferenceFunctional out{};
  const Vector3Field q = u0.vec() - u1.vec();
  for (const auto& c : q.components()) out.q_norm_sq += std::pow(spectral::l2_norm(c), 2);
  const auto grad0 = gradient(u0.vec());
  const auto grad1 = gradient(u1.vec());
  for (int m = 0; m < 2; ++m) {
    const Vector3Field v = parallel_transport(pair, grad0[static_cast<std::size_t>(m)]) - grad1[static_cast<std::size_t>(m)];
    double acc = 0.0;
    for (const auto& c : v.components()) acc += std::pow(spectral::l2_norm(c), 2);
    out.v_norm_sq[static_cast<std::size_t>(m)] = acc;
  }
  out.G = out.q_norm_sq + out.v_norm_sq[0] + out.v_norm_sq[1];
  return out;
}

SphereField interpolate_initial_data(const SphereField& a, const SphereField& b, double h) {
  if (h < 0.0 || h > 1.0) throw std::invalid_argument("interpolation parameter must lie in [0, 1]");
  if (h == 0.0) return a;
  if (h == 1.0) return b;
  Vector3Field y = (1.0 - h) * a.vec();
  y.add_scaled(h, b.vec());
  return project_to_sphere(y);
}

}  // namespace helilab
