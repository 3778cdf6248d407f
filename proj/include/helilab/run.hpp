#pragma once

// Experiment drivers behind the CLI modes, and the mode dispatcher itself.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "helilab/config.hpp"
#include "helilab/gauge.hpp"

namespace helilab {

// ---------------------------------------------------------------------------
// Experiments

struct MsmComparisonRow {
  DiagnosticsRecord diag;      // of the RK4-evolved u
  double psi_difference = 0.0;  // ||c psi_direct - psi_extracted||_{L^2}, c the best global phase
  double phase = 0.0;           // arg c
  double direct_div_A = 0.0;
  double direct_frame_drift = 0.0;
  double extracted_div_A = 0.0;
};

/// Evolves u0 by projected RK4 and, alongside, psi by msm_evolve from the
/// Coulomb frame of u0.  Every `record_every` steps psi is re-extracted from u
/// (fresh frame, Coulomb fixed) and compared with the directly evolved psi.
std::vector<MsmComparisonRow> compare_msm_routes(const SphereField& u0, double b, double T, double dt,
                                                 int homotopy_steps, int record_every,
                                                 const std::vector<double>& sobolev_exponents = {});

struct DeltaConvergenceRow {
  double delta = 0.0;
  double l2_error = 0.0;  // ||u^delta(T) - u^RK4(T)||_{L^2}
  double order = 0.0;     // log(err_prev / err) / log(delta_prev / delta); 0 on the first row
  EvolveStats stats;
};

/// `base` carries b, T, dt (for the RK4 reference) and the contraction
/// settings; its scheme and delta are overridden.
std::vector<DeltaConvergenceRow> delta_convergence(const SphereField& u0, const EvolveOptions& base,
                                                   const std::vector<double>& deltas);
/// Least-squares slope of log(error) against log(delta).
double fitted_order(const std::vector<DeltaConvergenceRow>& rows);

/// Smooth, compactly concentrated perturbation direction used by the
/// continuity experiment (off-centre, so it breaks the bump's symmetry).
Vector3Field continuity_direction(const GridPtr& grid);

struct ContinuityRow {
  double eps = 0.0;
  double h = 0.0;
  double initial_distance = 0.0;  // ||u0^(h) - u0^(0)||_{H^{s-1}}
  double max_distance = 0.0;      // sup_t ||u^(h)(t) - u^(0)(t)||_{H^{s-1}}
  double ratio = 0.0;
};

/// For each eps: u0^(1) = Pi(u0 + eps phi); for each h: u0^(h) interpolates
/// u0 and u0^(1).  All data are advanced by RK4 and compared every
/// `sample_every` steps.
std::vector<ContinuityRow> continuity_table(const SphereField& u0, double b, double T, double dt, double s,
                                            const std::vector<double>& eps, const std::vector<double>& h,
                                            int sample_every);

// ---------------------------------------------------------------------------
// CLI dispatch

/// Git blob hash ("blob <len>\0" + bytes), lowercase hex SHA-1.
std::string git_blob_sha1(const std::string& bytes);

struct RunInputs {
  std::string config_path;
  std::string config_text;
  std::vector<std::string> overrides;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Runs one mode, writing artifacts below cfg.output_dir.  Returns the exit
/// status; messages go to `log`.
int run(const RunConfig& cfg, const RunInputs& inputs, std::ostream& log);

}  // namespace helilab
