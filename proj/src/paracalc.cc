#include "holowave/paracalc.hh"

#include <cmath>

namespace hw {

double para_chi(double theta, double eta, const CutoffParams& cp) {
  double rho = std::abs(theta) / (1.0 + std::abs(eta));
  if (rho <= cp.eps1) return 1.0;
  if (rho >= cp.eps2) return 0.0;
  return 1.0 - smoothstep(std::log(rho / cp.eps1) / std::log(cp.eps2 / cp.eps1), cp.transition);
}

Field paraproduct(const Field& a, const Field& u, const CutoffParams& cp) {
  check_same_grid(a, u);
  int n = a.n();
  int lo = -n / 2 + 1, hi = n / 2 - 1;  // output lattice without Nyquist
  Field out(n);
  for (int eta = u.kmin(); eta <= u.kmax(); ++eta) {
    if (eta == 0) continue;  // psi(0) = 0
    cplx ue = u(eta);
    if (ue == 0.0) continue;
    // chi vanishes once |theta| >= eps2 (1 + |eta|)
    double reach = cp.eps2 * (1.0 + std::abs(eta));
    int tmax = static_cast<int>(std::ceil(reach));
    for (int th = -tmax; th <= tmax; ++th) {
      if (std::abs(th) >= reach) continue;
      if (th < a.kmin() || th > a.kmax()) continue;
      int xi = th + eta;
      if (xi < lo || xi > hi) continue;
      cplx at = a(th);
      if (at == 0.0) continue;
      out(xi) += para_chi(th, eta, cp) * at * ue;
    }
  }
  return out;
}

Field balanced(const Field& a, const Field& u, const CutoffParams& cp) {
  return mul(a, u) - paraproduct(a, u, cp) - paraproduct(u, a, cp);
}

Field para_commutator(const Field& f, const Field& g, const Field& u, const CutoffParams& cp) {
  return paraproduct(f, paraproduct(g, u, cp), cp) - paraproduct(g, paraproduct(f, u, cp), cp);
}

const char* region_name(Region r) {
  switch (r) {
    case Region::holo_lowhigh: return "holo_lowhigh";
    case Region::holo_balanced: return "holo_balanced";
    case Region::mixed_lowhigh: return "mixed_lowhigh";
    case Region::mixed_balanced: return "mixed_balanced";
    case Region::full: return "full";
  }
  return "?";
}

bool is_mixed(Region r) { return r == Region::mixed_lowhigh || r == Region::mixed_balanced; }

Field bilinear_apply(const BilinearSymbol& m, const Field& u, const Field& v) {
  check_same_grid(u, v);
  int n = u.n();
  int lo = -n / 2 + 1, hi = n / 2 - 1;
  Field out(n);
  bool mixed = is_mixed(m.region);
  for (int p = u.kmin(); p <= u.kmax(); ++p) {
    cplx up = u(p);
    if (up == 0.0) continue;
    if (mixed) up = std::conj(up);
    for (int q = v.kmin(); q <= v.kmax(); ++q) {
      cplx vq = v(q);
      if (vq == 0.0) continue;
      int o = mixed ? q - p : p + q;
      if (o < lo || o > hi) continue;
      double cut = 1.0;
      switch (m.region) {
        case Region::full: break;
        case Region::holo_lowhigh: cut = chi1(p, o); break;
        case Region::holo_balanced: cut = chi2(p, o); break;
        case Region::mixed_lowhigh: cut = o < 0 ? chi1(p, o) : 0.0; break;
        case Region::mixed_balanced: cut = o < 0 ? chi2(p, o) : 0.0; break;
      }
      if (m.region != Region::full && (p == 0 || q == 0)) cut = 0.0;
      if (cut == 0.0) continue;
      cplx s = m.eval(p, q);
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw std::domain_error("bilinear_apply: symbol " + m.name + " non-finite in support");
      out(o) += cut * s * up * vq;
    }
  }
  return out;
}

double sobolev_norm(const Field& u, double s) {
  double acc = 0;
  for (int k = u.kmin(); k <= u.kmax(); ++k) acc += std::pow(1.0 + double(k) * k, s) * std::norm(u(k));
  return std::sqrt(2 * kPi * acc);
}

double zygmund_norm(const Field& u, double s) {
  double m = 0;
  int nb = lp_block_count(u.n());
  for (int j = 0; j < nb; ++j) {
    Field b = lp_block(u, j);
    if (max_coeff(b) == 0) continue;
    m = std::max(m, std::pow(2.0, j * s) * sup_norm(b, 4));
  }
  return m;
}

double product_norm(const Field& f, const Field& g, double s) {
  double a = sobolev_norm(f, s + 0.5), b = sobolev_norm(g, s);
  return std::sqrt(a * a + b * b);
}

NormReport norm_report(const Field& f, const Field& g, double s_pair,
                       const std::vector<double>& exps) {
  NormReport r;
  for (double s : exps) {
    r.sobolev[s] = sobolev_norm(f, s);
    r.zygmund[s] = zygmund_norm(f, s);
  }
  r.product_Hs = product_norm(f, g, s_pair);
  return r;
}

}  // namespace hw
