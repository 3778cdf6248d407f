#pragma once

// Time integration of the Landau-Lifshitz equation:
//  * a projected classical RK4 method of lines, and
//  * the hyperbolic regularization -delta^2 u x u_tt + u_t = u x (-Laplace u + b curl u),
//    advanced in the scaled time tau = t / delta by a Duhamel fixed-point map
//    whose wave propagators are applied exactly in Fourier space.

#include <functional>
#include <optional>
#include <vector>

#include "helilab/fields.hpp"

namespace helilab {

// ---------------------------------------------------------------------------
// RK4

struct Rk4Options {
  bool dealias = true;
  /// dt must not exceed stability_factor * h^2.
  double stability_factor = 0.14;
};

double rk4_max_stable_dt(const SpectralGrid& grid, double stability_factor);

struct Rk4Step {
  SphereField u;
  double pre_projection_violation;  // max | |u| - 1 | before the final projection
};

/// One RK4 step on ll_rhs followed by project_to_sphere.  Throws
/// std::invalid_argument above the stability bound, DegeneratePoint if the
/// projection fails.
Rk4Step rk4_step_report(const SphereField& u, double b, double dt, const Rk4Options& opts = {});
SphereField rk4_step(const SphereField& u, double b, double dt, const Rk4Options& opts = {});

// ---------------------------------------------------------------------------
// Hyperbolic regularization

struct WaveState {
  SphereField U;
  Vector3Field V;  // dU/dtau
  double delta;
  double t_scaled;

  double physical_time() const { return delta * t_scaled; }
};

/// Right-hand side of U_tt = Laplace U + F_delta(U, V):
///   F = -delta^-1 U x V + |grad U|^2 U - |V|^2 U - b sum_j U_j U x d_j U.
/// Works on any R^3-valued U (fixed-point iterates leave the sphere).
Vector3Field f_delta(const Vector3Field& U, const Vector3Field& V, double delta, double b, bool dealias = true);
inline Vector3Field f_delta(const SphereField& U, const Vector3Field& V, double delta, double b, bool dealias = true) {
  return f_delta(U.vec(), V, delta, b, dealias);
}

struct FixedPointParams {
  double T_step = 0.0;  // window length in scaled time
  double M = 0.0;       // ball radius; <= 0 disables the ball audit
  int max_iter = 50;
  double contraction_tol = 1e-10;
};

/// Sobolev index of the contraction space (U in H^s, V in H^{s-1}).
inline constexpr double kContractionSobolevIndex = 3.0;

/// ||U - k||_{H^3} + ||V||_{H^2}.
double wave_state_size(const WaveState& state);
/// T = C0 delta / (||U0 - k||_{H^s} + ||V0||_{H^{s-1}} + 1)^2.
double contraction_window(const WaveState& state, double C0);

struct DuhamelTrace {
  std::vector<double> distances;  // successive-iterate distances, one per sweep
  double max_ball_distance = 0.0;  // max over sweeps/nodes of ||U_it - U0||_{H^s} + ||V_it||_{H^{s-1}}
  bool ball_ok = true;
  double pre_projection_violation = 0.0;
  /// Largest ratio distances[i+1] / distances[i].
  double max_ratio() const;
};

struct DuhamelOptions {
  bool dealias = true;
  /// Replaces F by 0 (free wave propagation), for testing the propagators.
  bool zero_nonlinearity = false;
};

struct DuhamelStep {
  WaveState state;
  DuhamelTrace trace;
};

/// Advances `state` by params.T_step of scaled time.  Throws NoContraction if
/// max_iter sweeps do not reach contraction_tol or the distance grows on two
/// consecutive sweeps; NonFinite on NaN/Inf.
DuhamelStep duhamel_step(const WaveState& state, double b, const FixedPointParams& params,
                         const DuhamelOptions& opts = {});

// ---------------------------------------------------------------------------
// Driver

enum class Scheme { rk4, hyperbolic_delta };

struct EvolveOptions {
  Scheme scheme = Scheme::rk4;
  double b = 0.0;
  double T = 1.0;          // physical end time
  double dt = 1e-4;        // RK4 step
  double delta = 0.125;    // regularization parameter
  double C0 = 10.0;        // contraction window constant (calibrated)
  double C1 = 1.0;         // ball constant; 0 disables the audit
  int max_iter = 50;
  double contraction_tol = 1e-10;
  std::optional<Vector3Field> initial_velocity;  // V0 for the regularized scheme (default 0)
  int diag_every = 1;
  std::vector<double> sobolev_exponents;
  bool dealias = true;
  double stability_factor = 0.14;
};

struct EvolveStats {
  std::size_t steps = 0;
  double max_pre_projection_violation = 0.0;
  double max_post_projection_violation = 0.0;
  double max_contraction_ratio = 0.0;
  double max_ball_distance = 0.0;
  double max_ball_ratio = 0.0;  // max_ball_distance / (||U0 - k|| + ||V0||) per window
  int max_sweeps = 0;
};

struct EvolveResult {
  SphereField u;
  std::vector<DiagnosticsRecord> diagnostics;
  EvolveStats stats;
};

/// Called after every accepted step with the new state and physical time.
using StepObserver = std::function<void(const SphereField& u, double t, std::size_t step)>;

/// Advances u0 to physical time T.  Diagnostics are recorded at t = 0, every
/// diag_every steps and at T.  Throws NonFinite, NoContraction, DegeneratePoint;
/// the observer has seen the last good state.
EvolveResult evolve(const SphereField& u0, const EvolveOptions& opts, const StepObserver& observer = {});

}  // namespace helilab
