#pragma once

// Sphere-valued fields and the pointwise/spectral expressions of the
// Landau-Lifshitz equation with helicity term,
//     du/dt = u x (-Laplace u + b curl u),  curl u = (d2 u3, -d1 u3, d1 u2 - d2 u1).

#include <array>
#include <map>
#include <span>
#include <vector>

#include "helilab/kernels.hpp"
#include "helilab/spectral.hpp"

namespace helilab {

using Vec3 = std::array<double, 3>;

inline constexpr Vec3 kNorth{0.0, 0.0, 1.0};  // the background state k
inline constexpr Vec3 kFrameE1{1.0, 0.0, 0.0};
inline constexpr Vec3 kFrameE2{0.0, 1.0, 0.0};

inline constexpr double kUnitTol = 1e-9;
inline constexpr double kTangencyTol = 1e-9;
/// |y| at or below this is treated as the excluded origin by every projection.
inline constexpr double kDegenerateNorm = 1e-8;

/// Three scalar fields on one grid, viewed as an R^3-valued map.
class Vector3Field {
 public:
  explicit Vector3Field(GridPtr grid, Vec3 fill = {0.0, 0.0, 0.0});
  Vector3Field(ScalarField x, ScalarField y, ScalarField z);

  const SpectralGrid& grid() const { return c_[0].grid(); }
  const GridPtr& grid_ptr() const { return c_[0].grid_ptr(); }
  std::size_t size() const { return c_[0].size(); }

  ScalarField& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  const ScalarField& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  std::span<const ScalarField> components() const { return c_; }
  Vec3 at(std::size_t i) const { return {c_[0][i], c_[1][i], c_[2][i]}; }
  void set(std::size_t i, const Vec3& v);

  kernels::Vec3View view();
  kernels::ConstVec3View view() const;

  Vector3Field& operator+=(const Vector3Field& o);
  Vector3Field& operator-=(const Vector3Field& o);
  Vector3Field& operator*=(double s);
  Vector3Field& add_scaled(double alpha, const Vector3Field& x);
  /// Adds a constant vector at every point.
  Vector3Field& shift(const Vec3& v);

  friend Vector3Field operator+(Vector3Field a, const Vector3Field& b) { return a += b; }
  friend Vector3Field operator-(Vector3Field a, const Vector3Field& b) { return a -= b; }
  friend Vector3Field operator*(double s, Vector3Field a) { return a *= s; }

 private:
  std::array<ScalarField, 3> c_;
};

/// A map from the periodic box into the unit sphere.
class SphereField {
 public:
  /// Wraps v after checking | |v| - 1 | <= unit_tol everywhere (std::invalid_argument otherwise).
  static SphereField from_unit(Vector3Field v, double unit_tol = kUnitTol);
  static SphereField constant(GridPtr grid, const Vec3& direction);

  const Vector3Field& vec() const { return v_; }
  const ScalarField& operator[](int i) const { return v_[i]; }
  const SpectralGrid& grid() const { return v_.grid(); }
  const GridPtr& grid_ptr() const { return v_.grid_ptr(); }
  std::size_t size() const { return v_.size(); }
  Vec3 at(std::size_t i) const { return v_.at(i); }

 private:
  explicit SphereField(Vector3Field v) : v_(std::move(v)) {}
  friend SphereField project_to_sphere(const Vector3Field& y);
  Vector3Field v_;
};

/// Pointwise y / |y|.  Throws DegeneratePoint naming the worst point if
/// |y| <= kDegenerateNorm anywhere.
SphereField project_to_sphere(const Vector3Field& y);

Vector3Field cross(const Vector3Field& a, const Vector3Field& b);
ScalarField dot(const Vector3Field& a, const Vector3Field& b);
/// a x c for a constant vector c.
Vector3Field cross(const Vector3Field& a, const Vec3& c);

/// Component spectra (the first two share one complex transform).
std::array<Spectrum, 3> forward3(const Vector3Field& u);
Vector3Field inverse3(const std::array<Spectrum, 3>& s);

std::array<Vector3Field, 2> gradient(const Vector3Field& u);
Vector3Field laplacian(const Vector3Field& u);
Vector3Field dealias(const Vector3Field& u);
bool all_finite(const Vector3Field& u);

/// u - k.
Vector3Field deviation_from_north(const SphereField& u);

double max_unit_violation(const Vector3Field& u);
/// max |X . u| over the grid.
double max_tangency_residual(const SphereField& u, const Vector3Field& x);
/// max |u - k| over nodes within `margin` of the box edges.
double boundary_deviation(const Vector3Field& u, const Vec3& target, double margin);

Vector3Field curl_term(const SphereField& u);
/// u x (-Laplace u + b curl u); pointwise tangent to u.
Vector3Field ll_rhs(const SphereField& u, double b);
/// Same expression for an arbitrary R^3-valued field (Runge-Kutta stages).
Vector3Field ll_rhs(const Vector3Field& u, double b);
/// Grid quadrature of 1/2 |grad u|^2 + (b/2) u . curl u, the functional whose
/// gradient is -Laplace u + b curl u (curl is symmetric, so the helicity
/// density needs the factor 1/2 to be conserved).
double energy(const SphereField& u, double b);
/// ||u - k||^2_{L^2}.
double l2_dist_sq(const SphereField& u);

struct L2IdentitySides {
  double lhs_rate;  // 2 (u - k, ll_rhs(u, b)) via the PDE
  double rhs;       // 2 b int (u1 d1 u3 + u2 d2 u3)
};
L2IdentitySides l2_identity_sides(const SphereField& u, double b);
/// 2 b int (u1 d1 u3 + u2 d2 u3), the rate of ||u - k||^2.
double l2_growth_rhs(const SphereField& u, double b);

/// Fourier symbol of the mollifier phi_eta: exactly 1 on |xi| <= 1/eta, 0 on
/// |xi| >= 2/eta, C-infinity in between.
double mollifier_symbol(double eta_xi);
/// Pi(phi_eta * (u0 - k) + k).
SphereField mollify_initial_data(const SphereField& u0, double eta);

/// ||u - k||_{H^{2 + eps0}}.
double blowup_monitor(const SphereField& u, double eps0);

struct DiagnosticsRecord {
  double t = 0.0;
  double energy = 0.0;
  double l2_dist_sq = 0.0;
  double l2_growth_rhs = 0.0;
  double l2_rhs_integral = 0.0;  // trapezoid integral of l2_growth_rhs since t = 0, per step
  double unit_violation = 0.0;
  std::map<double, double> hs_norms;  // sigma -> ||u - k||_{H^sigma}
};

DiagnosticsRecord diagnose(const SphereField& u, double b, double t, std::span<const double> sobolev_exponents);

}  // namespace helilab
