// Run configuration, presets, scenario checks and report emission.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "holowave/dynamics.hh"
#include "holowave/energies.hh"
#include "holowave/normal_forms.hh"
#include "json.hpp"

namespace hw {

// pass/fail thresholds; every field can be overridden from the config
struct Thresholds {
  double symbol_residual = 1e-10;
  double symbol_runtime_s = 10;
  double identity = 1e-12;
  double drift = 1e-6;
  double dispersion_rel = 1e-4;
  double lin_ratio_lo = 1.6, lin_ratio_hi = 2.4;
  double residual_ratio = 4, residual_tol = 0.25;
  double equiv_lo = 0.5, equiv_hi = 2;
  double growth_slack = 0.1;  // allowed relative rise of the max as amplitude shrinks
  double rk4_ratio = 16, rk4_tol = 0.2;
  double scaling = 1e-8;
};

struct InitialData {
  std::string preset = "random_band";  // zero, single_mode, two_mode, random_band
  std::string state_file;              // takes precedence when set
  double amplitude = 0.01;
  int k = -1, k1 = -1, k2 = -8;
  int kmin = -4, kmax = -1;
};

struct RunConfig {
  std::string scenario = "simulate";
  GridSpec grid;
  Params params;
  InitialData initial;
  System system = System::cww;
  StepperConfig stepper;
  std::vector<double> sweep;
  std::uint64_t seed = 1;
  std::string output_dir = "holowave_out";
  Thresholds thr;
  nlohmann::json options = nlohmann::json::object();  // scenario specific knobs

  template <class T>
  T opt(const std::string& key, T dflt) const {
    return options.contains(key) ? options.at(key).get<T>() : dflt;
  }
  void validate() const;
};

extern const std::vector<std::string> kScenarios;

// throws ConfigError naming the offending field
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

struct Criterion {
  std::string name;
  bool pass = false;
  double observed = 0;
  std::string threshold;  // human readable bound
};

struct ScenarioResult {
  std::string scenario;
  std::vector<Criterion> criteria;
  std::map<std::string, double> metrics;
  std::vector<std::string> artifacts;
  nlohmann::json details = nlohmann::json::object();
  // artifacts held until written
  std::string trajectory_csv;
  std::vector<nlohmann::json> snapshots;

  bool passed() const;
  void add(const std::string& name, bool pass, double observed, const std::string& threshold);
  nlohmann::json to_json() const;
};

SurfaceState preset_state(const InitialData& id, const GridSpec& grid, const Params& p,
                          std::uint64_t seed);
SurfaceState initial_state(const RunConfig& c);

// ensemble helper: random band state rescaled so that A0 <= a0_max
DiffState random_diff_state(int n, const Params& p, double amp, double a0_max, std::uint64_t seed,
                            double a1_max = 1e300);
// state vector for c.system built from the initial data
State initial_fields(const RunConfig& c);

// individual checks; each appends criteria and metrics to r
void check_symbols(const RunConfig& c, ScenarioResult& r);
void check_identities(const RunConfig& c, ScenarioResult& r);
void check_conservation(const RunConfig& c, ScenarioResult& r);
void check_dispersion(const RunConfig& c, ScenarioResult& r);
void check_linearization(const RunConfig& c, ScenarioResult& r);
void check_residuals(const RunConfig& c, ScenarioResult& r);
void check_equivalence(const RunConfig& c, ScenarioResult& r);
void check_growth(const RunConfig& c, ScenarioResult& r);
void check_integrator(const RunConfig& c, ScenarioResult& r);

// runs the scenario; writes artifacts to c.output_dir when write is set
ScenarioResult run(const RunConfig& c, bool write = true);

}  // namespace hw
