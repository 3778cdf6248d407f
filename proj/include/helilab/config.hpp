#pragma once

// Run configuration: flat `key = value` lines grouped under `[section]`
// headers.  Keys are addressed as `section.key` (top-level keys have no
// prefix), which is also the syntax of command-line overrides.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "helilab/initial_data.hpp"
#include "helilab/integrators.hpp"

namespace helilab {

enum class RunMode { simulate, verify_gauge, converge_delta, compare_msm, continuity, blowup_watch };

std::string mode_name(RunMode m);
RunMode parse_mode(const std::string& s);

struct RunConfig {
  RunMode mode = RunMode::simulate;

  int n = 64;
  double L = 16.0;
  double b = 0.0;

  double T = 0.1;
  double dt = 1e-4;
  Scheme scheme = Scheme::rk4;
  std::vector<double> delta{0.125};
  double C0 = 10.0;
  double C1 = 1.0;
  int max_iter = 50;
  double contraction_tol = 1e-10;

  InitialCondition initial_condition = BumpData{};

  int homotopy_steps = 64;

  std::vector<double> s_monitor{1.0, 2.0};
  double eps0 = 0.5;
  double alarm_factor = 10.0;

  std::vector<double> perturbation{1e-2, 1e-3};
  std::vector<double> h_samples{0.5, 1.0};
  double continuity_s = 3.0;

  std::filesystem::path output_dir = "out";
  int diag_every = 10;
  int snapshot_every = 0;  // 0: final snapshot only
};

using KeyValues = std::map<std::string, std::string>;

/// Parses the text format into section.key -> value.  Throws ConfigError on
/// malformed lines or duplicate keys.
KeyValues parse_key_values(const std::string& text);
/// Applies "section.key=value" overrides (later wins).
void apply_overrides(KeyValues& kv, const std::vector<std::string>& overrides);
/// Builds and validates a RunConfig.  Unknown keys and out-of-range values
/// throw ConfigError.
RunConfig build_config(const KeyValues& kv);
/// Canonical text of every effective setting, in the input format.
std::string echo_config(const RunConfig& cfg);

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

}  // namespace helilab
