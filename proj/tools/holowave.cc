// holowave <scenario> [--config PATH] [--out DIR] [--seed N]
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "holowave/harness.hh"

int main(int argc, char** argv) {
  CLI::App app{"holomorphic-coordinate water wave workbench"};
  std::string scenario, scenario_flag, config, out;
  std::uint64_t seed = 0;
  app.add_option("name", scenario, "scenario name");
  app.add_option("--scenario", scenario_flag, "scenario name (overrides the config file)");
  app.add_option("--config", config, "JSON config file");
  app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json j = nlohmann::json::object();
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw hw::ConfigError("--config: cannot read " + config);
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw hw::ConfigError("--config: " + std::string(e.what()));
      }
    }
    if (!scenario.empty()) j["scenario"] = scenario;
    if (!scenario_flag.empty()) j["scenario"] = scenario_flag;
    if (!j.contains("scenario")) throw hw::ConfigError("scenario: none given");
    if (!out.empty()) j["output_dir"] = out;
    if (*seed_opt) j["seed"] = seed;
    hw::RunConfig c = hw::config_from_json(j);
    hw::ScenarioResult r = hw::run(c);
    for (auto& cr : r.criteria)
      std::cout << (cr.pass ? "PASS " : "FAIL ") << cr.name << "  observed " << hw::fmt17(cr.observed)
                << "  (" << cr.threshold << ")\n";
    std::cout << r.scenario << ": " << (r.passed() ? "PASS" : "FAIL") << "  -> " << c.output_dir
              << "/result.json\n";
    return r.passed() ? 0 : 1;
  } catch (const hw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
