#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "holowave/harness.hh"

using namespace hw;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path tmpdir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("holowave_test_" + name);
  std::filesystem::remove_all(d);
  return d;
}

std::string field_of(const json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing") {
  RunConfig c = config_from_json({{"scenario", "dispersion"}, {"params", {{"g", 0.5}}}, {"seed", 9}});
  CHECK(c.scenario == "dispersion");
  CHECK(c.params.g == 0.5);
  CHECK(c.params.sigma == 1.0);
  CHECK(c.seed == 9);
  RunConfig d = config_from_json(config_to_json(c));
  CHECK(config_to_json(d) == config_to_json(c));
  CHECK(kScenarios.size() == 8);

  CHECK(field_of({{"scenario", "nope"}}).find("scenario") != std::string::npos);
  CHECK(field_of({{"scenario", "simulate"}, {"grid", {{"n_modes", 48}}}}).find("grid.n_modes") != std::string::npos);
  CHECK(field_of({{"scenario", "simulate"}, {"params", {{"sigma", -1}}}}).find("params.sigma") != std::string::npos);
  CHECK(field_of({{"scenario", "simulate"}, {"params", {{"g", "x"}}}}).find("params.g") != std::string::npos);
  CHECK(field_of({{"scenario", "simulate"}, {"stepper", {{"scheme", "euler"}}}}).find("stepper.scheme") !=
        std::string::npos);
  CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
}

TEST_CASE("presets") {
  GridSpec g;
  g.n_modes = 32;
  Params p;
  InitialData id;
  id.preset = "single_mode";
  id.k = -1;
  id.amplitude = 0.01;
  SurfaceState s = preset_state(id, g, p, 1);
  CHECK(s.W(-1) == 0.01);
  CHECK(max_coeff(s.Q) == 0);
  id.amplitude = 0;
  CHECK(max_coeff(preset_state(id, g, p, 1).W) == 0);
  id.preset = "random_band";
  id.amplitude = 0.01;
  SurfaceState a = preset_state(id, g, p, 5), b = preset_state(id, g, p, 5), c = preset_state(id, g, p, 6);
  CHECK(max_coeff(a.W - b.W) == 0);
  CHECK(max_coeff(a.W - c.W) > 0);
  CHECK(max_coeff(a.W) == doctest::Approx(0.01));
  id.kmax = 2;
  CHECK_THROWS(preset_state(id, g, p, 1));
  id.preset = "spiral";
  CHECK_THROWS_AS(preset_state(id, g, p, 1), ConfigError);
}

TEST_CASE("random states honour the control norm bound") {
  Params p;
  DiffState d = random_diff_state(64, p, 0.05, 0.02, 3);
  CHECK(control_norms(d).a0 <= 0.02);
  CHECK(control_norms(d).a0 > 0.019);
}

TEST_CASE("verify-symbols scenario") {
  RunConfig c = config_from_json({{"scenario", "verify-symbols"}, {"output_dir", tmpdir("sym").string()}});
  ScenarioResult r = run(c);
  CHECK(r.passed());
  json sym = json::parse(slurp(std::filesystem::path(c.output_dir) / "symbols.json"));
  CHECK(sym.size() == 11);
  json res = json::parse(slurp(std::filesystem::path(c.output_dir) / "result.json"));
  CHECK(res["scenario"] == "verify-symbols");
  CHECK(res["config"]["scenario"] == "verify-symbols");
}

TEST_CASE("dispersion scenario") {
  json opts = {{"dispersion_k", {-4}}, {"dispersion_g", {0.0}}, {"dispersion_sigma", {1.0}}};
  RunConfig c = config_from_json({{"scenario", "dispersion"}, {"options", opts}});
  ScenarioResult r = run(c, false);
  CHECK(r.passed());
  CHECK(r.details["dispersion"][0]["predicted"].get<double>() == doctest::Approx(8));
}

TEST_CASE("simulate with zero data and determinism") {
  auto d1 = tmpdir("zero");
  RunConfig c = config_from_json({{"scenario", "simulate"},
                                  {"initial_data", {{"preset", "zero"}}},
                                  {"stepper", {{"t_end", 0.01}}},
                                  {"output_dir", d1.string()}});
  ScenarioResult r = run(c);
  CHECK(r.passed());
  json st = json::parse(slurp(d1 / "states" / "00000.json"));
  CHECK(st.contains("t"));

  // identical config and seed give byte-identical reports
  json cfg = {{"scenario", "simulate"}, {"grid", {{"n_modes", 32}}}, {"stepper", {{"t_end", 0.02}}}, {"seed", 4}};
  auto a = tmpdir("det_a"), b = tmpdir("det_b");
  cfg["output_dir"] = a.string();
  run(config_from_json(cfg));
  cfg["output_dir"] = b.string();
  run(config_from_json(cfg));
  std::string ra = slurp(a / "result.json"), rb = slurp(b / "result.json");
  auto strip = [](std::string s, const std::string& dir) {
    for (size_t i; (i = s.find(dir)) != std::string::npos;) s.erase(i, dir.size());
    return s;
  };
  CHECK(strip(ra, a.string()) == strip(rb, b.string()));
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK_FALSE(slurp(a / "trajectory.csv").empty());
}

TEST_CASE("state files round trip through the config") {
  auto d = tmpdir("state");
  std::filesystem::create_directories(d);
  GridSpec g;
  g.n_modes = 32;
  InitialData id;
  SurfaceState s = preset_state(id, g, Params{}, 2);
  {
    std::ofstream out(d / "s.json");
    out << to_json(s).dump();
  }
  RunConfig c = config_from_json({{"scenario", "simulate"},
                                  {"grid", {{"n_modes", 32}}},
                                  {"initial_data", {{"state_file", (d / "s.json").string()}}}});
  SurfaceState t = initial_state(c);
  CHECK(max_coeff(t.W - s.W) == 0);
}
