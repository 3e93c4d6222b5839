#include "holowave/energies.hh"

#include <cmath>
#include <stdexcept>

#include "holowave/normal_forms.hh"

namespace hw {

namespace {
Field T(const Field& a, const Field& u) { return paraproduct(a, u); }
Field Dp(const Field& f, double s) { return bracket_pow(f, s); }
// Re int f g, no conjugation
double rint(const Field& f, const Field& g) { return integral_product(f, g).real(); }
// int f gbar
cplx dot(const Field& f, const Field& g) { return integral_product(f, conj(g)); }
}  // namespace

double base_energy(const Field& W, const Field& R, const Field& jw, double s) {
  Field Jm3h = jacobian_pow(jw, -1.5);
  Field A = Dp(W, s + 0.5), B = Dp(R, s);
  return dot(T(Jm3h, A), A).real() + dot(B, B).real();
}

EnergyReport modified_energy(const DiffState& d, double s) {
  if (!(s > 0.5)) throw std::invalid_argument("modified_energy: s must exceed 1/2");
  AuxFields x = aux_fields(d);
  const Field& W = d.Wd;
  const Field& R = d.R;
  EnergyReport e;
  e.s = s;
  e.base = base_energy(W, R, W, s);
  QuadCorrection q = quadratic_correction(d);
  e.base_nf = base_energy(W + q.W_hh, R + q.R_hh, W, s);

  Field Wb = conj(W), Rb = conj(R);
  Field c2 = pointwise({&W, &x.omY}, [](const cplx* v) { return (1.0 + std::conj(v[0])) * v[1] * v[1]; });
  const double sh = s + 0.5;
  e.cubic[0] = -2 * rint(Dp(T(x.Jm3h, W), sh), Dp(T(Wb, T(x.omYb, Wb)), sh));
  e.cubic[1] = -(2.0 / 3) * rint(Dp(W, sh), Dp(T(Rb, T(c2, Rb)), s - 0.5));
  e.cubic[2] = (2.0 / 3) * rint(Dp(R, s), Dp(T(Rb, T(x.omYb, Wb)), s));
  e.cubic[3] = -2 * rint(Dp(R, s), Dp(T(Wb, T(x.omYb, Rb)), s));
  e.total = e.base_nf + e.cubic[0] + e.cubic[1] + e.cubic[2] + e.cubic[3];
  double nrm = product_norm(W, R, s);
  e.norm_sq = nrm * nrm;
  e.equivalence_ratio = e.norm_sq > 0 ? e.total / e.norm_sq : 1.0;
  return e;
}

double linear_energy_quadratic(const LinState& l, const DiffState& bg) {
  AuxFields x = aux_fields(bg);
  const Field& w = l.w;
  const Field& r = l.r;
  double g = bg.params.g, sig = bg.params.sigma;
  cplx mass = g * dot(w, w) + dot(r, r);
  double scale = std::abs(mass) + 1e-300;
  if (std::abs(mass.imag()) > 1e-10 * scale) throw std::runtime_error("linearized_energy: imaginary residue");
  return -sig * dot(op_Lpara(w, x), w).real() + integral_product(w, T(x.Jmh, conj(derivative(w)))).imag() +
         mass.real() + integral_product(r, conj(derivative(r))).imag();
}

double linear_energy_cubic(const LinState& l, const DiffState& bg) {
  AuxFields x = aux_fields(bg);
  const Field& w = l.w;
  const Field& r = l.r;
  Field wa = derivative(w);
  Field iWa = im(x.Wa);
  Field c = mul(x.omY, x.Jmh);
  cplx v = -(2.0 / 3) * dot(T(re(bg.R), wa), r) - (1.0 / 3) * integral_product(T(iWa, w), T(c, conj(wa))) +
           (1.0 / 3) * integral_product(T(iWa, r), T(x.omY, conj(r)));
  return v.imag();
}

double linearized_energy(const LinState& l, const DiffState& bg) {
  return linear_energy_quadratic(l, bg) + linear_energy_cubic(l, bg);
}

}  // namespace hw
