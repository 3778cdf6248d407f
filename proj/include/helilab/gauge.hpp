#pragma once

// Orthonormal frames over a sphere field, the differentiated fields
//   psi_m = d_m u . v + i d_m u . w,   A_m = d_m v . w,
// Coulomb gauge fixing, and the modified Schroedinger map evolution of psi.
// Tangent vectors a v + b w are identified with a + i b.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "helilab/fields.hpp"

namespace helilab {

using ComplexPairField = std::array<ComplexScalarField, 2>;

struct Frame {
  Vector3Field v;
  Vector3Field w;  // u x v
};

/// Below this |U . V| the chaining step N(U, V) is accepted.
inline constexpr double kChainTol = 1.0 / 32.0;
inline constexpr double kCoulombTol = 1e-8;

/// (U - (U.V) V) / |U - (U.V) V|.  Throws DegeneratePoint where the
/// denominator is <= kDegenerateNorm.
Vector3Field normalize_against(const Vector3Field& U, const Vector3Field& V);

/// Frame by chaining N along H(x, a) = Pi((1 - a) u + a k), a = 1, (n-1)/n, ..., 0,
/// starting from k1.  Throws HomotopyTooCoarse, DegeneratePoint.
Frame build_frame(const SphereField& u, int homotopy_steps = 1);

struct FrameReport {
  double unit = 0.0;         // max | |v| - 1 |, | |w| - 1 |
  double tangency = 0.0;     // max |v.w|, |v.u|, |w.u|
  double orientation = 0.0;  // max |u x v - w|
  double boundary = 0.0;     // max |v - k1|, |w - k2| within `margin` of the edges
};
FrameReport frame_report(const SphereField& u, const Frame& f, double boundary_margin = 1.0);

/// Rotates the frame by chi solving Laplace chi = -div A~ (mean chi = 0),
/// repeating until the spectral divergence stops improving.
Frame coulomb_fix(const SphereField& u, const Frame& frame);
/// Rotation (v, w) -> (cos c v + sin c w, -sin c v + cos c w).
Frame rotate_frame(const Frame& f, const ScalarField& chi);
Frame rotate_frame(const Frame& f, double chi0);

/// A_m = d_m v . w (spectral derivatives).
std::array<ScalarField, 2> connection(const Frame& f);
ScalarField divergence(const std::array<ScalarField, 2>& a);

struct GaugeData {
  ComplexPairField psi;
  ComplexScalarField psi0;          // from (u, psi, A) by -i sum D_l psi_l - b sum u_l psi_l
  ComplexScalarField psi0_time;     // d_t u . v + i d_t u . w
  std::array<ScalarField, 2> A;
  std::array<double, 2> A_mean{};   // zero mode of A, invisible to the Riesz formula
  ScalarField A0;
  std::array<ScalarField, 2> A_tilde;  // A_l - b u_l / 2
  double b = 0.0;
};

/// ut defaults to ll_rhs(u, b).
GaugeData extract_gauge(const SphereField& u, const Frame& frame, double b,
                        const std::optional<Vector3Field>& ut = std::nullopt);

/// D_m f = d_m f + i A_m f.
ComplexScalarField covariant_derivative(const ComplexScalarField& f, const ScalarField& a, Axis axis);
/// Zero-mean part of A from Im(psi_1 conj psi_2) under div A = 0.
std::array<ScalarField, 2> connection_from_psi(const ComplexPairField& psi);
/// A_0 = sum_j |xi|^-1 R_j Im(psi_0 conj psi_j).
ScalarField temporal_connection(const ComplexScalarField& psi0, const ComplexPairField& psi);
ComplexScalarField psi0_from_spatial(const ComplexPairField& psi, const std::array<ScalarField, 2>& A,
                                     const SphereField& u, double b);

/// Sup-norm residuals: d{u,v,w}_frame_m (frame derivatives against psi and A),
/// psi_compatibility (D_1 psi_2 - D_2 psi_1), curvature (d_1 A_2 - d_2 A_1 - Im psi_1 conj psi_2),
/// div_A, A_riesz (zero-mean parts) and psi0_routes (spatial vs time-derivative psi_0).
std::map<std::string, double> verify_relations(const SphereField& u, const Frame& frame, const GaugeData& gauge);

/// -i sum_l D~_l D~_l psi_m + N_m for m = 1, 2 (A~ taken from gauge).
ComplexPairField msm_rhs(const GaugeData& gauge, const SphereField& u, double b);
/// -i sum_l D_l D_l psi_m + sum_l Im(psi_m conj psi_l) psi_l - b sum_l D_m(u_l psi_l).
ComplexPairField msm_rhs_covariant(const GaugeData& gauge, const SphereField& u, double b);

struct MsmState {
  ComplexPairField psi;
  Vector3Field u, v, w;
  std::array<double, 2> A_mean{};
  double t = 0.0;
};

MsmState msm_initial_state(const SphereField& u0, const Frame& coulomb_frame);

struct MsmRecord {
  double t = 0.0;
  double psi_l2 = 0.0;
  double div_A = 0.0;      // max |div A| of the frame carried along
  double frame_drift = 0.0;  // max |A(frame) - A(psi)| on the zero-mean parts
};

struct MsmResult {
  MsmState state;
  std::vector<MsmRecord> records;
};

/// RK4 in time for d_t psi_m = -i A_0 psi_m + msm_rhs with A, A_0 rebuilt from
/// psi at each stage, and (u, v, w) advanced by the time row of the frame
/// equations, re-orthonormalized after each step.  Throws NonFinite.
MsmResult msm_evolve(const MsmState& initial, double b, double T, double dt, int record_every = 1);

/// Global phase c with |c| = 1 minimizing ||c a - b||_{L^2} over both components.
cplx align_phase(const ComplexPairField& a, const ComplexPairField& b);
double l2_distance(const ComplexPairField& a, const ComplexPairField& b);

}  // namespace helilab
