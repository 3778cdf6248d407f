#include "helilab/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

#include "helilab/errors.hpp"

namespace helilab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(x))
    throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("'" + key + "': expected an integer, got '" + v + "'");
  return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  if (out.empty()) throw ConfigError("'" + key + "': empty list");
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

}  // namespace

std::string mode_name(RunMode m) {
  switch (m) {
    case RunMode::simulate: return "simulate";
    case RunMode::verify_gauge: return "verify-gauge";
    case RunMode::converge_delta: return "converge-delta";
    case RunMode::compare_msm: return "compare-msm";
    case RunMode::continuity: return "continuity";
    case RunMode::blowup_watch: return "blowup-watch";
  }
  return "?";
}

RunMode parse_mode(const std::string& s) {
  for (RunMode m : {RunMode::simulate, RunMode::verify_gauge, RunMode::converge_delta, RunMode::compare_msm,
                    RunMode::continuity, RunMode::blowup_watch})
    if (mode_name(m) == s) return m;
  throw ConfigError("unknown mode '" + s + "'");
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!kv.emplace(full, value).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + full + "'");
  }
  return kv;
}

void apply_overrides(KeyValues& kv, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
    const std::string key = trim(o.substr(0, eq));
    if (key.empty()) throw ConfigError("override '" + o + "' has an empty key");
    kv[key] = trim(o.substr(eq + 1));
  }
}

RunConfig build_config(const KeyValues& kv) {
  RunConfig c;
  std::set<std::string> used;
  const auto get = [&](const std::string& key, auto&& apply) {
    const auto it = kv.find(key);
    if (it == kv.end()) return false;
    used.insert(key);
    apply(it->second);
    return true;
  };
  const auto num = [&](const std::string& key, double& out) { get(key, [&](const std::string& v) { out = to_double(key, v); }); };
  const auto integer = [&](const std::string& key, int& out) {
    get(key, [&](const std::string& v) {
      const long long x = to_int(key, v);
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw ConfigError("'" + key + "' out of range");
      out = static_cast<int>(x);
    });
  };
  const auto list = [&](const std::string& key, std::vector<double>& out) {
    get(key, [&](const std::string& v) { out = to_list(key, v); });
  };

  if (!get("mode", [&](const std::string& v) { c.mode = parse_mode(v); })) throw ConfigError("missing key 'mode'");
  integer("grid.n", c.n);
  num("grid.L", c.L);
  num("physics.b", c.b);
  num("time.T", c.T);
  num("time.dt", c.dt);
  get("time.scheme", [&](const std::string& v) {
    if (v == "rk4")
      c.scheme = Scheme::rk4;
    else if (v == "hyperbolic")
      c.scheme = Scheme::hyperbolic_delta;
    else
      throw ConfigError("'time.scheme' must be rk4 or hyperbolic, got '" + v + "'");
  });
  list("time.delta", c.delta);
  num("time.C0", c.C0);
  num("time.C1", c.C1);
  integer("time.max_iter", c.max_iter);
  num("time.contraction_tol", c.contraction_tol);

  std::string family = "bump";
  get("initial_condition.family", [&](const std::string& v) { family = v; });
  double amplitude = 1.0, width = 1.0, epsilon = 0.5, k_max = 3.0;
  int mode = 1;
  long long seed = 1;
  const bool has_amp = kv.count("initial_condition.amplitude") > 0;
  num("initial_condition.amplitude", amplitude);
  num("initial_condition.width", width);
  num("initial_condition.epsilon", epsilon);
  num("initial_condition.k_max", k_max);
  integer("initial_condition.mode", mode);
  get("initial_condition.seed", [&](const std::string& v) { seed = to_int("initial_condition.seed", v); });
  if (!(width > 0.0)) throw ConfigError("'initial_condition.width' must be positive");
  if (family == "constant") {
    c.initial_condition = ConstantData{};
  } else if (family == "planar-rotation") {
    c.initial_condition = PlanarRotationData{epsilon, mode, width};
  } else if (family == "bump") {
    c.initial_condition = BumpData{amplitude, width};
  } else if (family == "random-band-limited") {
    if (seed < 0) throw ConfigError("'initial_condition.seed' must be nonnegative");
    if (!(k_max > 0.0)) throw ConfigError("'initial_condition.k_max' must be positive");
    c.initial_condition =
        RandomBandLimitedData{static_cast<std::uint64_t>(seed), k_max, has_amp ? amplitude : 0.5, width};
  } else {
    throw ConfigError("unknown initial_condition.family '" + family + "'");
  }

  integer("gauge.homotopy_steps", c.homotopy_steps);
  list("monitor.s", c.s_monitor);
  num("monitor.eps0", c.eps0);
  num("monitor.alarm_factor", c.alarm_factor);
  list("continuity.eps", c.perturbation);
  list("continuity.h", c.h_samples);
  num("continuity.s", c.continuity_s);
  get("output.dir", [&](const std::string& v) { c.output_dir = v; });
  integer("output.diag_every", c.diag_every);
  integer("output.snapshot_every", c.snapshot_every);

  for (const auto& [key, value] : kv)
    if (!used.count(key)) throw ConfigError("unknown key '" + key + "'");

  if (c.n < 8 || c.n % 2 != 0) throw ConfigError("grid.n must be even and >= 8");
  if (!(c.L > 0.0)) throw ConfigError("grid.L must be positive");
  if (!(c.T > 0.0)) throw ConfigError("time.T must be positive");
  if (!(c.dt > 0.0)) throw ConfigError("time.dt must be positive");
  for (double d : c.delta)
    if (!(d > 0.0 && d <= 1.0)) throw ConfigError("time.delta entries must lie in (0, 1]");
  if (!(c.C0 > 0.0)) throw ConfigError("time.C0 must be positive");
  if (!(c.C1 >= 0.0)) throw ConfigError("time.C1 must be nonnegative");
  if (c.max_iter < 1) throw ConfigError("time.max_iter must be >= 1");
  if (!(c.contraction_tol > 0.0)) throw ConfigError("time.contraction_tol must be positive");
  if (c.homotopy_steps < 1) throw ConfigError("gauge.homotopy_steps must be >= 1");
  if (!(c.eps0 > 0.0)) throw ConfigError("monitor.eps0 must be positive");
  if (!(c.alarm_factor > 1.0)) throw ConfigError("monitor.alarm_factor must exceed 1");
  for (double e : c.perturbation)
    if (!(e > 0.0)) throw ConfigError("continuity.eps entries must be positive");
  for (double h : c.h_samples)
    if (!(h > 0.0 && h <= 1.0)) throw ConfigError("continuity.h entries must lie in (0, 1]");
  if (!(c.continuity_s >= 1.0)) throw ConfigError("continuity.s must be >= 1");
  if (c.diag_every < 1) throw ConfigError("output.diag_every must be >= 1");
  if (c.snapshot_every < 0) throw ConfigError("output.snapshot_every must be >= 0");
  if (c.output_dir.empty()) throw ConfigError("output.dir must not be empty");
  return c;
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream os;
  os << "mode = " << mode_name(c.mode) << "\n\n";
  os << "[grid]\nn = " << c.n << "\nL = " << fmt(c.L) << "\n\n";
  os << "[physics]\nb = " << fmt(c.b) << "\n\n";
  os << "[time]\nT = " << fmt(c.T) << "\ndt = " << fmt(c.dt)
     << "\nscheme = " << (c.scheme == Scheme::rk4 ? "rk4" : "hyperbolic") << "\ndelta = " << fmt_list(c.delta)
     << "\nC0 = " << fmt(c.C0) << "\nC1 = " << fmt(c.C1) << "\nmax_iter = " << c.max_iter
     << "\ncontraction_tol = " << fmt(c.contraction_tol) << "\n\n";
  os << "[initial_condition]\nfamily = " << family_name(c.initial_condition) << "\n";
  std::visit(
      [&](const auto& ic) {
        using T = std::decay_t<decltype(ic)>;
        if constexpr (std::is_same_v<T, PlanarRotationData>)
          os << "epsilon = " << fmt(ic.epsilon) << "\nmode = " << ic.mode << "\nwidth = " << fmt(ic.width) << "\n";
        else if constexpr (std::is_same_v<T, BumpData>)
          os << "amplitude = " << fmt(ic.amplitude) << "\nwidth = " << fmt(ic.width) << "\n";
        else if constexpr (std::is_same_v<T, RandomBandLimitedData>)
          os << "seed = " << ic.seed << "\nk_max = " << fmt(ic.k_max) << "\namplitude = " << fmt(ic.amplitude)
             << "\nwidth = " << fmt(ic.width) << "\n";
      },
      c.initial_condition);
  os << "\n[gauge]\nhomotopy_steps = " << c.homotopy_steps << "\n\n";
  os << "[monitor]\ns = " << fmt_list(c.s_monitor) << "\neps0 = " << fmt(c.eps0)
     << "\nalarm_factor = " << fmt(c.alarm_factor) << "\n\n";
  os << "[continuity]\neps = " << fmt_list(c.perturbation) << "\nh = " << fmt_list(c.h_samples)
     << "\ns = " << fmt(c.continuity_s) << "\n\n";
  os << "[output]\ndir = " << c.output_dir.string() << "\ndiag_every = " << c.diag_every
     << "\nsnapshot_every = " << c.snapshot_every << "\n";
  return os.str();
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  KeyValues kv = parse_key_values(ss.str());
  apply_overrides(kv, overrides);
  return build_config(kv);
}

}  // namespace helilab
