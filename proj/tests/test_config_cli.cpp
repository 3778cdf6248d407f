#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helilab/config.hpp"
#include "helilab/errors.hpp"
#include "helilab/run.hpp"
#include "helilab/snapshot.hpp"

using namespace helilab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

RunConfig parse(const std::string& text, const std::vector<std::string>& overrides = {}) {
  KeyValues kv = parse_key_values(text);
  apply_overrides(kv, overrides);
  return build_config(kv);
}

TEST(Config, ParsesSectionsAndComments) {
  const RunConfig c = parse(
      "mode = simulate   # trailing comment\n"
      "[grid]\nn = 32\nL = 12.5\n"
      "[physics]\nb = 0.25\n"
      "[time]\ndelta = 0.25, 0.125\n"
      "[initial_condition]\nfamily = random-band-limited\nseed = 9\nk_max = 2\n");
  EXPECT_EQ(c.mode, RunMode::simulate);
  EXPECT_EQ(c.n, 32);
  EXPECT_EQ(c.L, 12.5);
  EXPECT_EQ(c.b, 0.25);
  EXPECT_EQ(c.delta, (std::vector<double>{0.25, 0.125}));
  const auto* ic = std::get_if<RandomBandLimitedData>(&c.initial_condition);
  ASSERT_NE(ic, nullptr);
  EXPECT_EQ(ic->seed, 9u);
  EXPECT_EQ(ic->k_max, 2.0);
  EXPECT_EQ(ic->amplitude, 0.5);
}

TEST(Config, OverridesWin) {
  const RunConfig c = parse("mode = simulate\n[grid]\nn = 32\n", {"grid.n=64", "physics.b = 0.5", "grid.n=16"});
  EXPECT_EQ(c.n, 16);
  EXPECT_EQ(c.b, 0.5);
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_key_values("[grid\nn = 8\n"), ConfigError);
  EXPECT_THROW(parse_key_values("just words\n"), ConfigError);
  EXPECT_THROW(parse_key_values("[grid]\nn = 8\nn = 16\n"), ConfigError);
  EXPECT_THROW(parse("[grid]\nn = 8\n"), ConfigError);
  EXPECT_THROW(parse("mode = simulate\n[grid]\nnn = 8\n"), ConfigError);
  EXPECT_THROW(parse("mode = simulate\n[grid]\nn = eight\n"), ConfigError);
  EXPECT_THROW(parse("mode = nap\n"), ConfigError);
  KeyValues kv;
  EXPECT_THROW(apply_overrides(kv, {"grid.n"}), ConfigError);
}

TEST(Config, ValidatesRanges) {
  const std::string base = "mode = simulate\n";
  for (const char* bad : {"grid.n=7", "grid.n=6", "grid.n=33", "time.dt=0", "time.T=-1", "time.delta=0",
                          "time.delta=1.5", "grid.L=0", "output.diag_every=0", "initial_condition.family=spiral",
                          "time.scheme=euler"})
    EXPECT_THROW(parse(base, {bad}), ConfigError) << bad;
  EXPECT_NO_THROW(parse(base, {"time.delta=1"}));
}

TEST(Config, EchoRoundTrips) {
  const RunConfig c = parse(
      "mode = continuity\n[grid]\nn = 48\n[time]\nscheme = hyperbolic\ndelta = 0.5, 0.1\ndt = 3e-5\n"
      "[initial_condition]\nfamily = planar-rotation\nepsilon = 0.2\nmode = 2\n[continuity]\neps = 0.1\n");
  const std::string echo = echo_config(c);
  const RunConfig again = build_config(parse_key_values(echo));
  EXPECT_EQ(echo_config(again), echo);
  EXPECT_EQ(again.dt, 3e-5);
  EXPECT_EQ(again.scheme, Scheme::hyperbolic_delta);
}

TEST(Config, ModeNamesRoundTrip) {
  for (RunMode m : {RunMode::simulate, RunMode::verify_gauge, RunMode::converge_delta, RunMode::compare_msm,
                    RunMode::continuity, RunMode::blowup_watch})
    EXPECT_EQ(parse_mode(mode_name(m)), m);
}

TEST(Manifest, GitBlobHash) {
  // Values from `git hash-object --stdin`.
  EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(ContinuityTable, HalvingThePerturbationKeepsTheRatio) {
  auto g = SpectralGrid::create(32, 16.0);
  const SphereField u0 = make_initial_data(g, BumpData{1.0, 1.0});
  const auto rows = continuity_table(u0, 0.5, 0.02, 1e-3, 3.0, {1e-2, 5e-3}, {1.0}, 5);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) EXPECT_GE(r.ratio, 1.0 - 1e-12);
  EXPECT_LT(std::max(rows[0].ratio, rows[1].ratio) / std::min(rows[0].ratio, rows[1].ratio), 2.0);
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("helilab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int run_cli(const std::string& args) {
    const std::string cmd = std::string(HELILAB_CLI) + " " + args + " 2>" + (dir_ / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }

  fs::path dir_;
};

TEST_F(Cli, SimulateConstantDataGivesIdenticalRows) {
  const auto cfg = write_config("c.cfg",
                                "[grid]\nn = 16\n[time]\nT = 0.01\ndt = 1e-3\n[initial_condition]\nfamily = constant\n"
                                "[output]\ndiag_every = 2\n");
  ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --override output.dir=" + (dir_ / "out").string()), 0);
  const auto rows = read_csv(dir_ / "out" / "diagnostics.csv");
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "energy", "l2_dist_sq", "l2_rhs_integral", "unit_violation",
                                               "hs_1", "hs_2"}));
  for (std::size_t r = 2; r < rows.size(); ++r)
    EXPECT_EQ(std::vector<std::string>(rows[r].begin() + 1, rows[r].end()),
              std::vector<std::string>(rows[1].begin() + 1, rows[1].end()));
  const Snapshot s = read_snapshot(dir_ / "out" / "final.hll");
  EXPECT_NEAR(s.t, 0.01, 1e-15);
  const std::string manifest = slurp(dir_ / "out" / "manifest.txt");
  EXPECT_NE(manifest.find("config_sha1 = " + git_blob_sha1(slurp(cfg))), std::string::npos);
  EXPECT_NE(manifest.find("artifact = diagnostics.csv"), std::string::npos);
  EXPECT_NE(manifest.find("status = ok"), std::string::npos);
}

TEST_F(Cli, IdenticalConfigsGiveIdenticalOutputs) {
  const auto cfg = write_config("r.cfg",
                                "[grid]\nn = 32\n[physics]\nb = 0.5\n[time]\nT = 0.02\ndt = 1e-3\n"
                                "[initial_condition]\nfamily = random-band-limited\nseed = 4\nk_max = 2\n");
  for (const char* out : {"a", "b"})
    ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --override output.dir=" + (dir_ / out).string()), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "diagnostics.csv"), slurp(dir_ / "b" / "diagnostics.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "final.hll"), slurp(dir_ / "b" / "final.hll"));
}

TEST_F(Cli, VerifyGaugeWritesResidualReport) {
  const auto cfg = write_config("g.cfg", "[grid]\nn = 128\n[physics]\nb = 0.5\n[initial_condition]\nfamily = bump\n");
  ASSERT_EQ(run_cli("verify-gauge --config " + cfg.string() + " --override output.dir=" + (dir_ / "out").string()), 0);
  std::istringstream in(slurp(dir_ / "out" / "residuals.txt"));
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find(" = ");
    ASSERT_NE(eq, std::string::npos);
    EXPECT_LT(std::stod(line.substr(eq + 3)), 1e-7) << line;
    ++count;
  }
  EXPECT_EQ(count, 11);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  const auto good = write_config("ok.cfg", "[grid]\nn = 16\n");
  const auto bad = write_config("bad.cfg", "[grid]\nn = 15\n");
  EXPECT_EQ(run_cli("simulate --config " + bad.string()), 2);
  EXPECT_EQ(run_cli("simulate --config " + (dir_ / "missing.cfg").string()), 2);
  EXPECT_EQ(run_cli("simulate --config " + good.string() + " --override grid.m=3"), 2);
  EXPECT_EQ(run_cli("dance --config " + good.string()), 2);
  EXPECT_EQ(run_cli("simulate"), 2);
}

TEST_F(Cli, SolverFailureExitsThreeAndFlushesLastGoodState) {
  const auto cfg = write_config("h.cfg",
                                "[grid]\nn = 32\n[physics]\nb = 0.5\n[time]\nscheme = hyperbolic\ndelta = 0.05\n"
                                "C0 = 1e6\nT = 1\ndt = 1e-3\n");
  ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --override output.dir=" + (dir_ / "out").string()), 3);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "last_good.hll"));
  const std::string manifest = slurp(dir_ / "out" / "manifest.txt");
  EXPECT_NE(manifest.find("status = runtime failure"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("last good state"), std::string::npos);
}

}  // namespace

namespace {

TEST(Config, ShippedExamplesLoad) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(HELILAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    const RunConfig c = load_config(entry.path());
    EXPECT_EQ(mode_name(c.mode), entry.path().stem().string());
    ++count;
  }
  EXPECT_EQ(count, 6);
}

}  // namespace
