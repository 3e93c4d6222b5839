// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "holowave/harness.hh"

using namespace hw;

namespace {

int failures = 0;

void report(int id, const std::string& title, const ScenarioResult& r, const std::string& extra = "") {
  bool ok = !r.criteria.empty() && r.passed();
  if (!ok) ++failures;
  std::printf("criterion %d %s: %s%s\n", id, title.c_str(), ok ? "PASS" : "FAIL", extra.c_str());
  for (auto& c : r.criteria)
    if (!c.pass) std::printf("    failed %s: observed %s, needed %s\n", c.name.c_str(), fmt17(c.observed).c_str(), c.threshold.c_str());
  std::fflush(stdout);
}

void info(const char* fmt, double v) {
  std::printf("    info ");
  std::printf(fmt, v);
  std::printf("\n");
}

double seconds(const std::function<void()>& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  RunConfig base;
  base.seed = 2024;

  {
    ScenarioResult r;
    double t = seconds([&] { check_symbols(base, r); });
    r.add("symbols.runtime_s", t < base.thr.symbol_runtime_s, t, "< 10");
    report(1, "symbol catalog", r, " (" + fmt17(t) + " s)");
    for (auto& [k, v] : r.metrics)
      if (k.rfind("printed_residual.", 0) == 0) info(("verbatim closed forms of " + k.substr(17) + ", residual %.3g").c_str(), v);
  }
  {
    ScenarioResult r;
    check_identities(base, r);
    report(2, "exact identities", r);
  }
  {
    ScenarioResult r;
    RunConfig c = base;
    double t = seconds([&] { check_conservation(c, r); });
    r.add("conservation.runtime_s", t < 120, t, "< 120");
    report(3, "conservation", r, " (" + fmt17(t) + " s)");
    info("energy drift %.3g", r.criteria[0].observed);
    info("momentum drift %.3g", r.criteria[1].observed);
    info("literal kinetic convention, energy drift %.3g", r.metrics["conservation.literal_energy_drift"]);
    info("printed gravity term, energy drift %.3g", r.metrics["conservation.printed_gravity_energy_drift"]);
  }
  {
    ScenarioResult r;
    check_dispersion(base, r);
    report(4, "dispersion", r);
    info("max relative frequency error %.3g", r.metrics["dispersion.max_rel_error"]);
  }
  {
    ScenarioResult r;
    check_linearization(base, r);
    report(5, "linearization consistency", r);
    info("error ratio %.4g", r.criteria[0].observed);
  }
  {
    ScenarioResult r;
    check_residuals(base, r);
    report(6, "paradifferential residuals", r);
    for (auto& c : r.criteria) std::printf("    %-40s ratio %.4f\n", c.name.c_str(), c.observed);
    for (auto& [k, v] : r.metrics) std::printf("    info %-35s %.4g\n", k.c_str(), v);
  }
  {
    ScenarioResult r;
    check_equivalence(base, r);
    report(7, "norm equivalence", r);
    for (auto& [k, v] : r.metrics) std::printf("    info %-40s %.4g\n", k.c_str(), v);
  }
  {
    ScenarioResult r;
    check_growth(base, r);
    report(8, "energy growth boundedness", r);
    for (auto& [k, v] : r.metrics) std::printf("    info %-40s %.4g\n", k.c_str(), v);
    std::printf("    info %s\n", r.details["growth"].dump().c_str());
  }
  {
    ScenarioResult r;
    check_integrator(base, r);
    report(9, "integrator order and scaling", r);
    for (auto& c : r.criteria) std::printf("    %-40s %.4g\n", c.name.c_str(), c.observed);
    info("scaling with g / lambda^2 instead, discrepancy %.3g", r.metrics["integrator.scaling_g_over_lambda2"]);
  }
  std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}
