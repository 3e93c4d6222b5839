#include "holowave/normal_forms.hh"

#include <cmath>
#include <stdexcept>

namespace hw {

namespace {

using Fn = cplx (*)(double, double);

BilinearSymbol mk(const std::string& name, Region r, Fn f) { return {name, r, f}; }

double Dxe(double x, double e) { return 9 * x * x + 14 * x * e + 9 * e * e; }
double Gez(double e, double z) { return 4 * e * e - 4 * e * z + 9 * z * z; }

double cut_chi1(double p, double q) { return chi1(p, q); }
double cut_chi2(double p, double q) { return chi2(p, q); }
double cut_chi2_lt(double p, double q) { return q < p ? chi2(p, q) : 0.0; }

using Row = std::vector<double>;

// ---- full WR system, low-high holomorphic (xi, eta)
LinearSystem sys_hlh(double x, double e, double X) {
  double s = x + e;
  return {{Row{s, -x, e * e, 0}, Row{0, e, -x * x, -s}, Row{e, 0, s * s, x}, Row{x * x, -s * s, 0, e * e}},
          {s * X, -x * X, -s * X, (3 * x * e + 2.5 * x * x) * X}};
}
// ---- full WR system, low-high mixed (eta, zeta)
LinearSystem sys_alh(double e, double z, double X) {
  double s = z - e;
  return {{Row{s, e, z * z, 0}, Row{0, z, e * e, -s}, Row{z, 0, s * s, -e}, Row{e * e, s * s, 0, -z * z}},
          {s * X, -e * X, -s * X, 0.5 * e * e * X}};
}
// ---- full WR system, balanced holomorphic, symmetrized; unknowns a(x,e), b, c, a(e,x)
LinearSystem sys_hhh(double x, double e, double X) {
  double s = x + e;
  return {{Row{s, -2 * x, 2 * e * e, 0}, Row{0.5 * e, 0, s * s, 0.5 * x},
           Row{0.5 * x * x, -s * s, 0, 0.5 * e * e}},
          {s * X, -0.5 * s * X, 0.25 * (5 * x * x + 6 * x * e + 5 * e * e) * X}};
}
std::vector<double> unk_hhh(const std::vector<BilinearSymbol>& s, double x, double e, double X) {
  return {s[0].eval(x, e).real() * X, s[1].eval(x, e).real() * X, s[2].eval(x, e).real() * X,
          s[0].eval(e, x).real() * X};
}
// ---- full WR system, balanced mixed (eta, zeta)
LinearSystem sys_ahh(double e, double z, double X) {
  double s = z - e;
  return {{Row{s, e, z * z, 0}, Row{0, z, e * e, -s}, Row{z, 0, s * s, -e}, Row{e * e, s * s, 0, -z * z}},
          {s * X, s * X, -s * X, 0.5 * (e * e - z * z) * X}};
}
// ---- toy cubic (xi, eta), zeta = xi + eta
LinearSystem sys_toy(double x, double e, double X) {
  double z = x + e;
  return {{Row{z * z, -e * e, x, 0}, Row{0, x * x, -e, -z * z}, Row{x * x, 0, z, e * e}, Row{-e, z, 0, -x}},
          {-0.5 * x * e * z * X, 0, 0, 0}};
}
// ---- linearized balanced, first kind (eta, zeta); also the second low-high mixed kind
LinearSystem sys_bal1(double e, double z, double X) {
  double s = z - e;
  return {{Row{s, e, z * z, 0}, Row{0, z, e * e, -s}, Row{z, 0, s * s, -e}, Row{e * e, s * s, 0, -z * z}},
          {-e * X, -e * X, e * X, 0.5 * e * (e + z) * X}};
}
// ---- linearized balanced holomorphic (xi, eta)
LinearSystem sys_bal2h(double x, double e, double X) {
  double s = x + e;
  return {{Row{s, -e, x * x, 0}, Row{0, x, -e * e, -s}, Row{x, 0, s * s, e}, Row{e * e, -s * s, 0, x * x}},
          {0, -s * X, -e * X, s * (x + 1.5 * e) * X}};
}
// ---- linearized balanced mixed (eta, zeta); second right-hand side amended
LinearSystem sys_bal2a(double e, double z, double X) {
  double s = z - e;
  return {{Row{s, -z, -e * e, 0}, Row{0, e, z * z, s}, Row{e, 0, -s * s, -z}, Row{z * z, -s * s, 0, -e * e}},
          {-z * X, z * X, z * X, 0.5 * z * (e + z) * X}};
}
// ---- linearized low-high, first kind holomorphic (xi, eta)
LinearSystem sys_lh1h(double x, double e, double X) {
  double s = x + e;
  return {{Row{s, -e, x * x, 0}, Row{0, x, -e * e, -s}, Row{x, 0, s * s, e}, Row{e * e, -s * s, 0, x * x}},
          {0, -0.5 * x * X, 0, x * s * X}};
}
// ---- linearized low-high, first kind mixed (eta, zeta)
LinearSystem sys_lh1a(double e, double z, double X) {
  double s = z - e;
  return {{Row{s, -z, -e * e, 0}, Row{0, e, z * z, s}, Row{e, 0, -s * s, -z}, Row{z * z, -s * s, 0, -e * e}},
          {0, 0.5 * e * X, 0, e * z * X}};
}
// ---- linearized low-high, second kind holomorphic (xi, eta)
LinearSystem sys_lh2h(double x, double e, double X) {
  double s = x + e;
  return {{Row{s, -x, e * e, 0}, Row{0, e, -x * x, -s}, Row{e, 0, s * s, x}, Row{x * x, -s * s, 0, e * e}},
          {0, -s * X, -x * X, (1.5 * x * s + e * e) * X}};
}

SymbolSet make_set(const std::string& label, Region region, const std::string& vars,
                   std::vector<BilinearSymbol> syms, std::vector<BilinearSymbol> printed,
                   double (*cut)(double, double), LinearSystem (*sys)(double, double, double),
                   double (*den)(double, double)) {
  SymbolSet s;
  s.label = label;
  s.region = region;
  s.vars = vars;
  s.symbols = std::move(syms);
  s.printed = std::move(printed);
  s.cutoff = cut;
  s.system = sys;
  s.denominator = den;
  return s;
}

std::vector<SymbolFamily> build_catalog() {
  const Region HL = Region::holo_lowhigh, HB = Region::holo_balanced;
  const Region AL = Region::mixed_lowhigh, AB = Region::mixed_balanced;
  const std::string XE = "xi,eta", EZ = "eta,zeta";
  std::vector<SymbolFamily> cat;

  // full_hlh
  cat.push_back({"full_hlh",
                 {make_set("", HL, XE,
                           {mk("a", HL, [](double x, double e) -> cplx {
                              return (-9 * pow(x, 4) - pow(x, 3) * e + 26 * x * x * e * e + 28 * x * pow(e, 3) + 12 * pow(e, 4)) /
                                     (2 * x * e * Dxe(x, e));
                            }),
                            mk("b", HL, [](double x, double e) -> cplx {
                              return -(9 * pow(x, 3) + 28 * x * x * e + 27 * x * e * e + 4 * pow(e, 3)) / (2 * e * Dxe(x, e));
                            }),
                            mk("c", HL, [](double x, double e) -> cplx {
                              return -(3 * pow(x, 3) + 6 * x * x * e + 11 * x * e * e + 6 * pow(e, 3)) / (x * e * Dxe(x, e));
                            }),
                            mk("d", HL, [](double x, double e) -> cplx {
                              return (6 * pow(x, 3) + 15 * x * x * e + 7 * x * e * e - 4 * pow(e, 3)) / (2 * e * Dxe(x, e));
                            })},
                           {}, cut_chi1, sys_hlh, Dxe)},
                 ""});

  // full_alh
  cat.push_back({"full_alh",
                 {make_set("", AL, EZ,
                           {mk("a", AL, [](double e, double z) -> cplx {
                              return -(6 * pow(e, 4) - 15 * pow(e, 3) * z + 20 * e * e * z * z - 20 * e * pow(z, 3) + 12 * pow(z, 4)) /
                                     (2 * e * (z - e) * Gez(e, z));
                            }),
                            mk("b", AL, [](double e, double z) -> cplx {
                              return (2 * pow(e, 3) - 3 * e * e * z + 7 * e * z * z - 14 * pow(z, 3)) / (2 * (z - e) * Gez(e, z));
                            }),
                            mk("c", AL, [](double e, double z) -> cplx {
                              return z * (5 * e * e - 7 * e * z + 6 * z * z) / (e * (z - e) * Gez(e, z));
                            }),
                            mk("d", AL, [](double e, double z) -> cplx {
                              return (8 * pow(e, 3) - 20 * e * e * z + 23 * e * z * z - 14 * pow(z, 3)) / (2 * (z - e) * Gez(e, z));
                            })},
                           {}, cut_chi1, sys_alh, Gez)},
                 ""});

  // full_hhh: three symbols, symmetrized system
  {
    SymbolSet s = make_set(
        "", HB, XE,
        {mk("a", HB, [](double x, double e) -> cplx {
           return (6 * pow(e, 4) + 21 * pow(e, 3) * x + 15 * e * e * x * x - e * pow(x, 3) - 9 * pow(x, 4)) /
                  (2 * x * e * Dxe(x, e));
         }),
         mk("b", HB, [](double x, double e) -> cplx {
           return -(x + e) * (x + e) * (9 * x * x + 10 * x * e + 9 * e * e) / (4 * x * e * Dxe(x, e));
         }),
         mk("c", HB, [](double x, double e) -> cplx { return -3 * pow(x + e, 3) / (2 * x * e * Dxe(x, e)); })},
        {mk("a", HB, [](double x, double e) -> cplx {
           return -(27 * pow(x, 4) + 39 * pow(x, 3) * e + 23 * x * x * e * e - 3 * x * pow(e, 3) - 6 * pow(e, 4)) /
                  (2 * x * e * Dxe(x, e));
         }),
         mk("b", HB, [](double x, double e) -> cplx {
           return -3 * (x + e) * (x + e) * (9 * x * x + 10 * x * e + 9 * e * e) / (4 * x * e * Dxe(x, e));
         }),
         mk("c", HB, [](double x, double e) -> cplx { return -3 * pow(x + e, 3) / (2 * x * e * Dxe(x, e)); })},
        cut_chi2, sys_hhh, Dxe);
    s.unknowns = unk_hhh;
    s.symmetrized = true;
    cat.push_back({"full_hhh", {s}, "printed a and b do not solve the symmetrized system"});
  }

  // full_ahh
  cat.push_back({"full_ahh",
                 {make_set("", AB, EZ,
                           {mk("a", AB, [](double e, double z) -> cplx {
                              return 3 * (e - z) * (2 * e * e - e * z + 2 * z * z) / (2 * e * Gez(e, z));
                            }),
                            mk("b", AB, [](double e, double z) -> cplx {
                              return -(e - z) * (2 * e * e + e * z + 9 * z * z) / (2 * e * Gez(e, z));
                            }),
                            mk("c", AB, [](double e, double z) -> cplx { return -3 * z * (e - z) / (e * Gez(e, z)); }),
                            mk("d", AB, [](double e, double z) -> cplx {
                              return -(e - z) * (8 * e * e - 8 * e * z + 9 * z * z) / (2 * e * Gez(e, z));
                            })},
                           {mk("c", AB, [](double e, double z) -> cplx { return -3 * z / (e * Gez(e, z)); })},
                           cut_chi2_lt, sys_ahh, Gez)},
                 "printed c lacks the factor (eta - zeta)"});

  // toy cubic (xi, eta), zeta = xi + eta
  cat.push_back({"toy_cubic",
                 {make_set("", HL, XE,
                           {mk("a", HL, [](double x, double e) -> cplx { return -3 * pow(x + e, 3) / (2 * Dxe(x, e)); }),
                            mk("b", HL, [](double x, double e) -> cplx {
                              return -(x + e) * (2 * x * x + 3 * x * e + 3 * e * e) / (2 * Dxe(x, e));
                            }),
                            mk("c", HL, [](double x, double e) -> cplx {
                              return x * (x + e) * (3 * x * x + 3 * x * e + 2 * e * e) / (2 * Dxe(x, e));
                            }),
                            mk("d", HL, [](double x, double e) -> cplx { return -x * (x + e) * (x + e) / Dxe(x, e); })},
                           {}, cut_chi1, sys_toy, Dxe)},
                 ""});

  // linearized balanced, first kind
  auto bal1_syms = [](Region r) {
    return std::vector<BilinearSymbol>{
        mk("a", r, [](double e, double z) -> cplx { return 3 * (2 * e * e - e * z + 2 * z * z) / (2 * Gez(e, z)); }),
        mk("b", r, [](double e, double z) -> cplx { return -(2 * e * e + e * z + 9 * z * z) / (2 * Gez(e, z)); }),
        mk("c", r, [](double e, double z) -> cplx { return -3 * z / Gez(e, z); }),
        mk("d", r, [](double e, double z) -> cplx { return -(8 * e * e - 8 * e * z + 9 * z * z) / (2 * Gez(e, z)); })};
  };
  cat.push_back({"lin_bal1", {make_set("", AB, EZ, bal1_syms(AB), {}, cut_chi2_lt, sys_bal1, Gez)}, ""});

  cat.push_back({"lin_bal2h",
                 {make_set("", HB, XE,
                           {mk("a", HB, [](double x, double e) -> cplx {
                              return (2 * pow(x, 3) - 9 * x * x * e - 16 * x * e * e - 9 * pow(e, 3)) / (2 * x * Dxe(x, e));
                            }),
                            mk("b", HB, [](double x, double e) -> cplx {
                              return -(15 * pow(x, 3) + 31 * x * x * e + 25 * x * e * e + 9 * pow(e, 3)) / (2 * x * Dxe(x, e));
                            }),
                            mk("c", HB, [](double x, double e) -> cplx {
                              return -(x * x + 4 * x * e + 3 * e * e) / (x * Dxe(x, e));
                            }),
                            mk("d", HB, [](double x, double e) -> cplx {
                              return (3 * pow(x, 3) + 12 * x * x * e + 11 * x * e * e + 6 * pow(e, 3)) / (2 * x * Dxe(x, e));
                            })},
                           {}, cut_chi2, sys_bal2h, Dxe)},
                 ""});

  cat.push_back({"lin_bal2a",
                 {make_set("", AB, EZ,
                           {mk("a", AB, [](double e, double z) -> cplx {
                              return z * (8 * e * e - 8 * e * z + 9 * z * z) / (2 * e * Gez(e, z));
                            }),
                            mk("b", AB, [](double e, double z) -> cplx {
                              return z * (2 * e * e + e * z + 9 * z * z) / (2 * e * Gez(e, z));
                            }),
                            mk("c", AB, [](double e, double z) -> cplx { return 3 * z * z / (e * Gez(e, z)); }),
                            mk("d", AB, [](double e, double z) -> cplx {
                              return -3 * z * (2 * e * e - e * z + 2 * z * z) / (2 * e * Gez(e, z));
                            })},
                           {mk("d", AB, [](double e, double z) -> cplx {
                             return -z * (2 * e * e - e * z + 2 * z * z) / (2 * e * Gez(e, z));
                           })},
                           cut_chi2_lt, sys_bal2a, Gez)},
                 "second equation right-hand side is zeta X; printed d lacks a factor 3"});

  // linearized low-high, first kind: holomorphic and mixed sub-families
  cat.push_back(
      {"lin_lh1",
       {make_set("h", HL, XE,
                 {mk("a", HL, [](double x, double e) -> cplx {
                    return -(pow(x, 3) + 3 * x * x * e + 5 * x * e * e + 3 * pow(e, 3)) / (Dxe(x, e) * e);
                  }),
                  mk("b", HL, [](double x, double e) -> cplx {
                    return -(3 * pow(x, 3) + 15 * x * x * e + 16 * x * e * e + 6 * pow(e, 3)) / (2 * Dxe(x, e) * e);
                  }),
                  mk("c", HL, [](double x, double e) -> cplx {
                    return (2 * x * x + 5 * x * e + e * e) / (2 * Dxe(x, e) * e);
                  }),
                  mk("d", HL, [](double x, double e) -> cplx {
                    return -(3 * pow(x, 3) + 3 * x * x * e + x * e * e + pow(e, 3)) / (2 * Dxe(x, e) * e);
                  })},
                 {}, cut_chi1, sys_lh1h, Dxe),
        make_set("a", AL, EZ,
                 {mk("a", AL, [](double e, double z) -> cplx {
                    return -z * (e * e - e * z + 3 * z * z) / ((e - z) * Gez(e, z));
                  }),
                  mk("b", AL, [](double e, double z) -> cplx {
                    return (2 * pow(e, 3) - 5 * e * e * z + 8 * e * z * z - 6 * pow(z, 3)) / (2 * (e - z) * Gez(e, z));
                  }),
                  mk("c", AL, [](double e, double z) -> cplx { return z * z / (2 * (e - z) * Gez(e, z)); }),
                  mk("d", AL, [](double e, double z) -> cplx {
                    return -(2 * pow(e, 3) - e * e * z + 4 * e * z * z + pow(z, 3)) / (2 * (e - z) * Gez(e, z));
                  })},
                 {mk("a", AL, [](double e, double z) -> cplx {
                    return z * (e * e - e * z + 3 * z * z) / ((e - z) * Gez(e, z));
                  }),
                  mk("c", AL, [](double e, double z) -> cplx { return 3 * z * z / (2 * (e - z) * Gez(e, z)); })},
                 cut_chi1, sys_lh1a, Gez)},
       "mixed part: printed a has the wrong sign and printed c a spurious factor 3"});

  cat.push_back({"lin_lh2h",
                 {make_set("", HL, XE,
                           {mk("a", HL, [](double x, double e) -> cplx {
                              return -(9 * pow(x, 3) + 10 * x * x * e + 3 * x * e * e - 6 * pow(e, 3)) / (2 * e * Dxe(x, e));
                            }),
                            mk("b", HL, [](double x, double e) -> cplx {
                              return -(9 * pow(x, 3) + 19 * x * x * e + 19 * x * e * e + 9 * pow(e, 3)) / (2 * e * Dxe(x, e));
                            }),
                            mk("c", HL, [](double x, double e) -> cplx { return -3 * (x + e) * (x + e) / (e * Dxe(x, e)); }),
                            mk("d", HL, [](double x, double e) -> cplx {
                              return 3 * (2 * pow(x, 3) + 5 * x * x * e + 6 * x * e * e + 3 * pow(e, 3)) / (2 * e * Dxe(x, e));
                            })},
                           {}, cut_chi1, sys_lh2h, Dxe)},
                 ""});

  cat.push_back({"lin_lh2a", {make_set("", AL, EZ, bal1_syms(AL), {}, cut_chi1, sys_bal1, Gez)}, ""});
  return cat;
}

}  // namespace

std::vector<double> SymbolSet::unknown_vector(const std::vector<BilinearSymbol>& s, double p, double q,
                                              double X) const {
  if (unknowns) return unknowns(s, p, q, X);
  std::vector<double> v;
  for (auto& m : s) v.push_back(m.eval(p, q).real() * X);
  return v;
}

const BilinearSymbol& SymbolSet::sym(const std::string& name) const {
  for (auto& s : symbols)
    if (s.name == name) return s;
  throw std::out_of_range("symbol " + name + " not in set");
}

const SymbolSet& SymbolFamily::part(const std::string& label) const {
  for (auto& p : parts)
    if (p.label == label) return p;
  throw std::out_of_range("family " + name + " has no part " + label);
}

const std::vector<SymbolFamily>& symbol_catalog() {
  static const std::vector<SymbolFamily> cat = build_catalog();
  return cat;
}

const SymbolFamily& family(const std::string& name) {
  for (auto& f : symbol_catalog())
    if (f.name == name) return f;
  throw std::out_of_range("no symbol family " + name);
}

std::vector<std::pair<double, double>> sample_support(const SymbolSet& s, int count,
                                                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<std::pair<double, double>> out;
  while (static_cast<int>(out.size()) < count) {
    double q = -std::exp(U(rng) * std::log(1000.0));
    double lo, hi;
    switch (s.region) {
      case Region::holo_lowhigh:
      case Region::mixed_lowhigh: lo = 1e-3, hi = 0.1; break;
      case Region::holo_balanced: lo = 1.0 / 20, hi = 20; break;
      default: lo = 1.0 / 20, hi = 1; break;
    }
    double rho = std::exp(std::log(lo) + U(rng) * (std::log(hi) - std::log(lo)));
    double p = q * rho;
    if (s.cutoff(p, q) > 0) out.emplace_back(p, q);
  }
  return out;
}

double relative_residual(const LinearSystem& L, const std::vector<double>& s) {
  double num = 0, den = 0;
  for (size_t i = 0; i < L.A.size(); ++i) {
    double r = -L.rhs[i], sc = std::abs(L.rhs[i]);
    for (size_t j = 0; j < s.size(); ++j) {
      r += L.A[i][j] * s[j];
      sc += std::abs(L.A[i][j] * s[j]);
    }
    num = std::max(num, std::abs(r));
    den = std::max(den, sc);
  }
  return den > 0 ? num / den : 0.0;
}

namespace {
double det_small(std::vector<std::vector<double>> A) {
  // Gaussian elimination with partial pivoting; square matrices only
  size_t n = A.size();
  double det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    for (size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    if (A[piv][c] == 0) return 0;
    if (piv != c) std::swap(A[piv], A[c]), det = -det;
    det *= A[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      double f = A[r][c] / A[c][c];
      for (size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
    }
  }
  return det;
}

// symbols with verbatim forms substituted where they differ
std::vector<BilinearSymbol> with_printed(const SymbolSet& s) {
  auto v = s.symbols;
  for (auto& p : s.printed)
    for (auto& m : v)
      if (m.name == p.name) m = p;
  return v;
}
}  // namespace

FamilyReport verify_family(const SymbolFamily& f,
                           const std::vector<std::vector<std::pair<double, double>>>& samples) {
  FamilyReport rep;
  rep.family = f.name;
  rep.min_denominator = INFINITY;
  for (size_t k = 0; k < f.parts.size(); ++k) {
    const SymbolSet& s = f.parts[k];
    auto printed = with_printed(s);
    for (auto [p, q] : samples.at(k)) {
      double X = s.cutoff(p, q);
      LinearSystem L = s.system(p, q, X);
      if (L.A.size() == L.A[0].size()) {
        double scale = 1;
        for (auto& row : L.A)
          for (double v : row) scale = std::max(scale, std::abs(v));
        if (std::abs(det_small(L.A)) <= 1e-14 * std::pow(scale, L.A.size())) rep.singular = true;
      }
      rep.max_residual = std::max(rep.max_residual, relative_residual(L, s.unknown_vector(s.symbols, p, q, X)));
      if (!s.printed.empty())
        rep.max_residual_printed =
            std::max(rep.max_residual_printed, relative_residual(L, s.unknown_vector(printed, p, q, X)));
      rep.min_denominator = std::min(rep.min_denominator, s.denominator(p, q));
      ++rep.n_samples;
    }
  }
  return rep;
}

FamilyReport verify_family(const SymbolFamily& f, int samples_per_part, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::pair<double, double>>> pts;
  for (auto& s : f.parts) pts.push_back(sample_support(s, samples_per_part, rng));
  return verify_family(f, pts);
}

// ---------------------------------------------------------------------------

namespace {

Field T(const Field& a, const Field& u) { return paraproduct(a, u); }

Field coefW(const Field& W, cplx (*fn)(cplx)) {
  return pointwise({&W}, [fn](const cplx* v) { return fn(v[0]); });
}

// apply symbol `name` of a set, with the set's region
Field B(const SymbolSet& s, const std::string& name, const Field& u, const Field& v) {
  BilinearSymbol m = s.sym(name);
  m.region = s.region;
  return bilinear_apply(m, u, v);
}

}  // namespace

QuadCorrection quadratic_correction(const DiffState& d) {
  AuxFields x = aux_fields(d);
  const Field& W = d.Wd;
  const Field& R = d.R;
  Field TW = T(x.omY, W);       // T_{1-Y} W
  Field TR = T(x.omY, R);       // T_{1-Y} R
  Field TbW = T(x.omYb, W);     // T_{1-Ybar} W
  Field TbR = T(x.omYb, R);     // T_{1-Ybar} R
  Field cC = coefW(W, [](cplx w) { return std::abs(1.0 + w) * (1.0 + w) * (1.0 + w) / (1.0 + std::conj(w)); });
  Field cCa = coefW(W, [](cplx w) { return std::abs(1.0 + w) * (1.0 + w); });
  Field cAa = coefW(W, [](cplx w) { return (1.0 + std::conj(w)) / ((1.0 + w) * (1.0 + w)); });
  Field TcR = T(cC, R), TcaR = T(cCa, R), TaW = T(cAa, W);

  const SymbolSet& hl = family("full_hlh").part();
  const SymbolSet& al = family("full_alh").part();
  const SymbolSet& hh = family("full_hhh").part();
  const SymbolSet& ah = family("full_ahh").part();
  QuadCorrection q;
  // mixed forms receive the unconjugated field; bilinear_apply conjugates it
  q.W_lh = B(hl, "b", W, TW) + B(hl, "c", R, TcR) + B(al, "b", W, TbW) + B(al, "c", R, TcaR);
  q.R_lh = B(hl, "a", R, TW) + B(hl, "d", W, TR) + B(al, "a", R, TaW) + B(al, "d", W, TbR);
  q.W_hh = B(hh, "b", W, TW) + B(hh, "c", R, TcR) + B(ah, "b", W, TbW) + B(ah, "c", R, TcaR);
  q.R_hh = B(hh, "a", R, TW) + B(ah, "a", R, TaW) + B(ah, "d", W, TbR);
  return q;
}

LinCorrection linearized_nf_correction(const LinState& l, const DiffState& bg) {
  AuxFields x = aux_fields(bg);
  const Field& W = bg.Wd;
  const Field& R = bg.R;
  const Field& w = l.w;
  const Field& r = l.r;
  Field TW = T(x.omY, W);
  Field TbW = T(x.omYb, W);
  Field c_mh = coefW(W, [](cplx z) { return (1.0 + z) * (1.0 + z) / std::abs(1.0 + z); });
  Field c_wy = coefW(W, [](cplx z) { return (1.0 + z) / (1.0 + std::conj(z)); });
  Field c_3h = coefW(W, [](cplx z) {
    cplx zb = 1.0 + std::conj(z);
    return std::pow(std::abs(1.0 + z), 3) / (zb * zb);
  });
  Field c_h = coefW(W, [](cplx z) { return cplx(std::abs(1.0 + z)); });
  Field TmhR = T(c_mh, R), TwyR = T(c_wy, R), T3hR = T(c_3h, R), ThR = T(c_h, R);

  const SymbolSet& b1 = family("lin_bal1").part();
  const SymbolSet& b2h = family("lin_bal2h").part();
  const SymbolSet& b2a = family("lin_bal2a").part();
  const SymbolSet& l1h = family("lin_lh1").part("h");
  const SymbolSet& l1a = family("lin_lh1").part("a");
  const SymbolSet& l2h = family("lin_lh2h").part();
  const SymbolSet& l2a = family("lin_lh2a").part();

  LinCorrection o;
  // balanced
  o.w_bal = B(b1, "b", w, TbW) + B(b1, "c", r, TmhR) + B(b2h, "b", TW, w) + B(b2h, "c", T3hR, r) +
            B(b2a, "b", TW, w) + B(b2a, "c", ThR, r);
  o.r_bal = B(b1, "a", r, TW) + B(b1, "d", w, TwyR) + B(b2h, "a", TW, r) + B(b2h, "d", R, w) +
            B(b2a, "a", TW, r) + B(b2a, "d", TwyR, w);
  // low-high
  o.w_lh = B(l1h, "b", TW, w) + B(l1h, "c", T3hR, r) + B(l1a, "b", TW, w) + B(l1a, "c", ThR, r) +
           B(l2h, "b", w, TW) + B(l2h, "c", r, T3hR) + B(l2a, "b", w, TW) + B(l2a, "c", r, TmhR);
  o.r_lh = B(l1h, "a", TW, r) + B(l1h, "d", R, w) + B(l1a, "a", TW, r) + B(l1a, "d", TwyR, w) +
           B(l2h, "a", r, TW) + B(l2h, "d", w, R) + B(l2a, "a", r, TW) + B(l2a, "d", w, TwyR);
  return o;
}

ZVariables z_variables(const DiffState& d, const LinState& l) {
  Field hW = kI * abs_pow(d.Wd, 0.5), hw = kI * abs_pow(l.w, 0.5);
  return {d.R + hW, d.R - hW, l.r + hw, l.r - hw};
}

}  // namespace hw
