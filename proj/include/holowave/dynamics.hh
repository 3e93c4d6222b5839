// Right-hand sides, paradifferential reductions, residual diagnostics, time stepping.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "holowave/fields.hh"

namespace hw {

struct LinState {
  Field w, r;
};

struct FieldPair {
  Field a, b;
};

// (W_t, Q_t)
FieldPair rhs_wq(const SurfaceState& s);

struct WRRhs {
  Field Wt, Rt;  // full right-hand sides, not projected
  double anti_defect_W = 0, anti_defect_R = 0;  // |Pbar rhs| / |rhs|
};
WRRhs rhs_wr(const DiffState& d);
WRRhs rhs_wr(const DiffState& d, const AuxFields& x);

// the linearized system around bg in the good variables (w, r = q - R w)
LinState rhs_linearized(const LinState& l, const DiffState& bg);
LinState rhs_linearized(const LinState& l, const DiffState& bg, const AuxFields& x);
// homogeneous paradifferential flow
LinState rhs_para_linear(const LinState& l, const DiffState& bg);
LinState rhs_para_linear(const LinState& l, const DiffState& bg, const AuxFields& x);

// L w = d(J^{-1/2} w_a) - i c w_a - i (P c_a) w
Field op_L(const Field& w, const AuxFields& x);
// script L w = d T_{J^{-1/2}} d w
Field op_Lpara(const Field& w, const AuxFields& x);

// conversions between (w, q) and (w, r)
LinState lin_to_good(const LinState& wq, const DiffState& bg);
LinState lin_from_good(const LinState& wr, const DiffState& bg);

// (G, K) of the paradifferential reduction of the WR system
struct ReductionResidual {
  Field G, K;
  double norm = 0;  // H^{s+1/2} x H^s norm with s = 1
};
ReductionResidual para_reduction_wr(const DiffState& d);

struct ResidualEntry {
  std::string name;
  double hs = 0;       // Sobolev H^1 norm
  double zyg = 0;      // Zygmund C^{1/2}_* norm
  double leading = 0;  // H^1 norm of the leading term it is compared with
};
struct ResidualReport {
  std::vector<ResidualEntry> entries;
  const ResidualEntry& at(const std::string& name) const;
};
// para-material derivative identities; s2 is the second exponent for the J^s checks
ResidualReport para_material_residuals(const DiffState& d, double s2 = 1.0);

struct CommutatorResidual {
  double amended = 0;  // leading term includes -T_{b_alpha} script L u
  double literal = 0;  // printed leading term only
  double leading = 0;
};
// L^2 norms of [T_{D_t}, script L] u minus its leading part
CommutatorResidual commutator_residual(const DiffState& d, const Field& u);

// time stepping on a vector of fields
enum class Scheme { rk4, ifrk4 };
enum class System { cww, wr, wr_lin, wr_para };

struct StepperConfig {
  double dt = 0;  // 0 selects half the CFL limit
  Scheme scheme = Scheme::rk4;
  bool reproject = false;    // zero positive frequencies after each step
  bool remove_mean = false;  // zero the k = 0 mode after each step
  double t_end = 1.0;
  double cfl_safety = 0.5;
  int snapshot_every = 0;  // steps between snapshots, 0: only first and last
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BlowUpError : std::runtime_error {
  std::vector<Field> last_good;
  double t_last = 0;
  BlowUpError(const std::string& m, std::vector<Field> s, double t)
      : std::runtime_error(m), last_good(std::move(s)), t_last(t) {}
};

double cfl_limit(int n, const Params& p, double safety = 0.5);
void check_cfl(double dt, int n, const Params& p, double safety = 0.5);

using State = std::vector<Field>;
State rhs(System sys, const State& u, const Params& p);
// exact propagator of the zero-linearized flow on each pair (k < 0 only)
State linear_propagate(const State& u, const Params& p, double t);
State step(System sys, const State& u, const Params& p, double dt, Scheme scheme);

struct Monitors {
  double t = 0;
  std::optional<double> E, P, A0, A1, holo_W, holo_R, Es, Elin;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Monitors> monitors;
  std::string csv() const;
};

struct MonitorConfig {
  bool energy_s = false;  // evaluate E_s (costly)
  double s = 1.25;
};

Trajectory simulate(System sys, const State& u0, const Params& p, const StepperConfig& cfg,
                    const MonitorConfig& mc = {});
Monitors monitor(System sys, const State& u, const Params& p, double t, const MonitorConfig& mc);

// tau = sqrt(g|k| + sigma |k|^3)
double dispersion_check(int k, const Params& p);

// 17 significant digits
std::string fmt17(double v);

}  // namespace hw
