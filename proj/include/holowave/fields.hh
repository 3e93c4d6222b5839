// Water-wave states, auxiliary fields, conserved quantities, control norms.
#pragma once

#include <stdexcept>
#include <string>

#include "holowave/paracalc.hh"
#include "json.hpp"

namespace hw {

struct Params {
  double g = 1.0;
  double sigma = 1.0;
  void validate() const;
};

struct SurfaceState {
  Field W, Q;
  Params params;
  int n() const { return W.n(); }
};

struct DiffState {
  Field Wd, R;  // bold W = W_alpha and R = Q_alpha / (1 + W_alpha)
  Params params;
  int n() const { return Wd.n(); }
};

// |1 + W_alpha| < threshold somewhere on the grid
struct DegeneracyError : std::runtime_error {
  double min_jacobian;
  explicit DegeneracyError(double m);
};

constexpr double kDegeneracyThreshold = 0.1;
// throws DegeneracyError when min |1 + w| < threshold
double check_jacobian(const Field& Wd);

DiffState differentiate_state(const SurfaceState& s, double* r_defect = nullptr);

struct AuxFields {
  Field Y, J, a, b, M, c, F;
  // variants kept for comparison
  Field a_alt;  // Im P[R Rbar_alpha]
  Field M_alt;  // second expression for M
  double y_defect = 0;  // pre-projection holomorphy defect of Y
  // frequently reused pieces
  Field Wa, Waa, Ra;  // derivatives of bold W and R
  Field omY, omYb;    // 1 - Y and 1 - Ybar
  Field Jmh, Jm3h, Jh;  // J^{-1/2}, J^{-3/2}, J^{1/2}
};

AuxFields aux_fields(const DiffState& d);
// J^s on the padded grid
Field jacobian_pow(const Field& Wd, double s);
// b = 2 Re P[Q_alpha / J] from the surface variables
Field b_from_surface(const SurfaceState& s);
// F = P[(Q_alpha - Qbar_alpha)/J] from the surface variables
Field F_from_surface(const SurfaceState& s);

double conserved_energy(const SurfaceState& s);
// the kinetic term read literally as Re int Q Qbar_alpha
double conserved_energy_literal(const SurfaceState& s);
// general form: Re int kin Q Qbar_alpha + c_sigma sigma (J^{1/2} - 1 - Re W_alpha)
//               + gravity, either g |W|^2 (1 + W_alpha) or, with height_form,
//               2 g (Im W)^2 (1 + Re W_alpha)
double energy_variant(const SurfaceState& s, cplx kin, double c_sigma, bool height_form);
double conserved_momentum(const SurfaceState& s);
// quadratic energy sigma |w|^2_{H1 dot} + |q|^2_{H1/2 dot} + g |w|^2_{L2}
double quadratic_energy(const SurfaceState& s);

struct ControlNorms {
  double a0 = 0, a1 = 0, a32 = 0, eps = 0.01;
};
ControlNorms control_norms(const DiffState& d, double eps = 0.01);

// (W, R)(t, a) -> (W(l^{3/2} t, l a), l^{1/2} R(l^{3/2} t, l a)), with g
// rescaled by g_factor (l^2 keeps the system invariant)
DiffState scale_state(const DiffState& d, double lambda, double g_factor);
DiffState scale_state(const DiffState& d, double lambda);
Field dilate(const Field& f, double lambda);

// JSON schema: {grid:{n_modes}, params:{g,sigma}, W/Q or Wd/R: [[re,im],...]}
nlohmann::json field_to_json(const Field& f);
Field field_from_json(const nlohmann::json& j, int n);
nlohmann::json to_json(const SurfaceState& s);
nlohmann::json to_json(const DiffState& d);
SurfaceState surface_from_json(const nlohmann::json& j);
DiffState diff_from_json(const nlohmann::json& j);

}  // namespace hw
