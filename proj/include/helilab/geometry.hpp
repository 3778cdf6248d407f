#pragma once

// Comparison of two sphere fields through pointwise minimal geodesics and
// parallel transport along them.

#include <array>

#include "helilab/fields.hpp"

namespace helilab {

/// Pointwise angles at or beyond pi - kAntipodalMargin are rejected.
inline constexpr double kAntipodalMargin = 1e-6;

class GeodesicPair {
 public:
  /// Throws AntipodalPoints when some pointwise angle reaches pi - kAntipodalMargin.
  static GeodesicPair create(SphereField start, SphereField end);

  const SphereField& start() const { return start_; }
  const SphereField& end() const { return end_; }
  double max_angle() const { return max_angle_; }

 private:
  GeodesicPair(SphereField a, SphereField b, double max_angle)
      : start_(std::move(a)), end_(std::move(b)), max_angle_(max_angle) {}
  SphereField start_, end_;
  double max_angle_;
};

/// Angle between two unit vectors, accurate for small and near-pi angles.
double sphere_angle(const Vec3& a, const Vec3& b);
/// Point at parameter s on the minimal great-circle arc from a to b.
Vec3 slerp(const Vec3& a, const Vec3& b, double s);
/// d/ds of slerp(a, b, s).
Vec3 slerp_velocity(const Vec3& a, const Vec3& b, double s);
/// Parallel transport of xi in T_a S^2 to T_b S^2 along the minimal arc, extended
/// to R^3 as the rotation about a x b that takes a to b.
Vec3 transport(const Vec3& a, const Vec3& b, const Vec3& xi);

SphereField geodesic_eval(const GeodesicPair& pair, double s);
/// Transports a tangent field over pair.start() to one over pair.end().
Vector3Field parallel_transport(const GeodesicPair& pair, const Vector3Field& xi);

struct DifferenceFunctional {
  double G;                        // ||q||^2 + ||V_1||^2 + ||V_2||^2
  double q_norm_sq;                // ||u0 - u1||^2_{L^2}
  std::array<double, 2> v_norm_sq;  // ||X(1,0) d_m u0 - d_m u1||^2_{L^2}
};
DifferenceFunctional difference_functional(const SphereField& u0, const SphereField& u1);

/// Pi((1 - h) a + h b); h = 0, 1 return the endpoints exactly.
SphereField interpolate_initial_data(const SphereField& a, const SphereField& b, double h);

}  // namespace helilab
