#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "helilab/config.hpp"
#include "helilab/errors.hpp"
#include "helilab/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral Landau-Lifshitz simulator with helicity and gauge analysis"};
  std::string mode;
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("mode", mode, "simulate | verify-gauge | converge-delta | compare-msm | continuity | blowup-watch")
      ->required();
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--override", overrides, "section.key=value, may be repeated");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : helilab::kExitConfig;
  }

  helilab::RunInputs inputs{config_path, {}, overrides};
  helilab::RunConfig cfg;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw helilab::ConfigError("cannot read config file '" + config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    inputs.config_text = ss.str();
    auto kv = helilab::parse_key_values(inputs.config_text);
    helilab::apply_overrides(kv, overrides);
    kv["mode"] = mode;
    cfg = helilab::build_config(kv);
  } catch (const helilab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return helilab::kExitConfig;
  }
  return helilab::run(cfg, inputs, std::cerr);
}
