// Modified energies for the WR system and the linearized energy.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "holowave/fields.hh"

namespace hw {

struct LinState;

struct EnergyReport {
  double s = 0;
  double base = 0;     // E_s^1(W, R)
  double base_nf = 0;  // E_s^1 after the balanced quadratic correction
  std::array<double, 4> cubic{};  // I~_1 .. I~_4
  double total = 0;    // base_nf + sum of the cubic corrections
  double norm_sq = 0;  // |(W, R)|^2 in H^{s+1/2} x H^s
  double equivalence_ratio = 1;
  std::vector<std::string> omitted{"I5", "E4"};
};

// E_s^1(W, R) with the weight J^{-3/2} taken from jw
double base_energy(const Field& W, const Field& R, const Field& jw, double s);
EnergyReport modified_energy(const DiffState& d, double s);

// paradifferential energy without and with the cubic high-frequency part
double linear_energy_quadratic(const LinState& l, const DiffState& bg);
double linear_energy_cubic(const LinState& l, const DiffState& bg);
// E_lin + E^3_high
double linearized_energy(const LinState& l, const DiffState& bg);

}  // namespace hw
