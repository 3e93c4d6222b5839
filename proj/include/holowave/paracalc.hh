// Paraproducts, balanced products, bilinear symbol operators and norms.
#pragma once

#include <functional>
#include <map>
#include <string>

#include "holowave/spectral.hh"

namespace hw {

// chi(theta, eta) of the quantization: ratio |theta| / (1 + |eta|)
double para_chi(double theta, double eta, const CutoffParams& cp = {});

// (T_a u)^(xi) = sum_eta chi(xi - eta, eta) a^(xi - eta) psi(eta) u^(eta)
Field paraproduct(const Field& a, const Field& u, const CutoffParams& cp = {});
// Pi(a, u) = a u - T_a u - T_u a
Field balanced(const Field& a, const Field& u, const CutoffParams& cp = {});
// [T_f, T_g] u
Field para_commutator(const Field& f, const Field& g, const Field& u,
                      const CutoffParams& cp = {});

enum class Region { holo_lowhigh, holo_balanced, mixed_lowhigh, mixed_balanced, full };
const char* region_name(Region r);
bool is_mixed(Region r);

// eval(p, q): p is the frequency of the first argument u, q that of v.
// Holomorphic kinds sum over p + q = output; mixed kinds conjugate u, so
// the output frequency is q - p.
struct BilinearSymbol {
  std::string name;
  Region region = Region::full;
  std::function<cplx(double, double)> eval;
};

Field bilinear_apply(const BilinearSymbol& m, const Field& u, const Field& v);

double sobolev_norm(const Field& u, double s);
double zygmund_norm(const Field& u, double s);
// H^{s+1/2} x H^s
double product_norm(const Field& f, const Field& g, double s);

struct NormReport {
  std::map<double, double> sobolev;
  std::map<double, double> zygmund;
  double product_Hs = 0;
};
NormReport norm_report(const Field& f, const Field& g, double s_pair,
                       const std::vector<double>& exps);

}  // namespace hw
