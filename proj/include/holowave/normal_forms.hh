// Normal-form symbol catalog, verification, quadratic and linearized corrections.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "holowave/dynamics.hh"

namespace hw {

struct LinearSystem {
  std::vector<std::vector<double>> A;
  std::vector<double> rhs;
};

// One solved system: symbols a, b, c (, d) over (p, q) = (xi, eta) for the
// holomorphic kinds or (eta, zeta) for the mixed kinds.
struct SymbolSet {
  std::string label;
  Region region = Region::holo_lowhigh;  // cutoff used when the symbols are applied
  std::string vars;                      // "xi,eta" or "eta,zeta"
  std::vector<BilinearSymbol> symbols;   // rational parts, cutoff factor excluded
  std::vector<BilinearSymbol> printed;   // verbatim forms where they differ from symbols
  // cutoff of the system, including the output indicator
  double (*cutoff)(double, double) = nullptr;
  // linear system at (p, q) with cutoff value X
  LinearSystem (*system)(double, double, double) = nullptr;
  // unknown vector for the system; defaults to symbols[i](p,q) * X
  std::vector<double> (*unknowns)(const std::vector<BilinearSymbol>&, double, double, double) = nullptr;
  double (*denominator)(double, double) = nullptr;
  bool symmetrized = false;

  std::vector<double> unknown_vector(const std::vector<BilinearSymbol>& s, double p, double q,
                                     double X) const;
  const BilinearSymbol& sym(const std::string& name) const;
};

struct SymbolFamily {
  std::string name;
  std::vector<SymbolSet> parts;
  std::string note;
  const SymbolSet& part(const std::string& label = "") const;
};

const std::vector<SymbolFamily>& symbol_catalog();
const SymbolFamily& family(const std::string& name);

// random points in the open support of the set's cutoff
std::vector<std::pair<double, double>> sample_support(const SymbolSet& s, int count,
                                                      std::mt19937_64& rng);

struct FamilyReport {
  std::string family;
  int n_samples = 0;
  double max_residual = 0;
  double min_denominator = 0;
  double max_residual_printed = 0;  // verbatim closed forms, where they differ
  bool singular = false;            // a sampled matrix was singular
};

// relative residual max|A s - b| / max(sum |A_ij s_j| + |b_i|)
double relative_residual(const LinearSystem& L, const std::vector<double>& s);
FamilyReport verify_family(const SymbolFamily& f, int samples_per_part, unsigned long seed);
FamilyReport verify_family(const SymbolFamily& f,
                           const std::vector<std::vector<std::pair<double, double>>>& samples);

// quadratic normal form of the WR system, split by cutoff region
struct QuadCorrection {
  Field W_hh, R_hh, W_lh, R_lh;
};
QuadCorrection quadratic_correction(const DiffState& d);

struct LinCorrection {
  Field w_bal, r_bal, w_lh, r_lh;
  Field w() const { return w_bal + w_lh; }
  Field r() const { return r_bal + r_lh; }
};
LinCorrection linearized_nf_correction(const LinState& l, const DiffState& bg);

struct ZVariables {
  Field Zp, Zm, zp, zm;
};
ZVariables z_variables(const DiffState& d, const LinState& l);

}  // namespace hw
