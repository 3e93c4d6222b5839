#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "holowave/paracalc.hh"

using namespace hw;

namespace {

Field random_field(int n, int seed, int kmax = 1 << 30) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Field f(n);
  for (int k = f.kmin() + 1; k <= f.kmax(); ++k)
    if (std::abs(k) <= kmax) f(k) = cplx(nd(rng), nd(rng));
  return f;
}

double max_diff(const Field& a, const Field& b) { return max_coeff(a - b); }

// the cutoff of the quantization written out from its definition
double chi_ref(double th, double eta) {
  double rho = std::abs(th) / (1 + std::abs(eta));
  if (rho <= 0.05) return 1;
  if (rho >= 0.1) return 0;
  double x = std::log(rho / 0.05) / std::log(2.0);
  return 1 - x * x * (3 - 2 * x);
}

// brute force lattice sum over every (theta, eta) pair
Field para_ref(const Field& a, const Field& u) {
  int n = a.n();
  Field o(n);
  for (int th = a.kmin(); th <= a.kmax(); ++th)
    for (int eta = u.kmin(); eta <= u.kmax(); ++eta) {
      int xi = th + eta;
      if (eta == 0 || xi <= -n / 2 || xi >= n / 2) continue;
      o(xi) += chi_ref(th, eta) * a(th) * u(eta);
    }
  return o;
}

}  // namespace

TEST_CASE("paraproduct against the direct lattice sum") {
  int n = 64;
  Field a = random_field(n, 1), u = random_field(n, 2);
  CHECK(max_diff(paraproduct(a, u), para_ref(a, u)) < 1e-12);
  CHECK(max_coeff(paraproduct(a, Field(n))) == 0);
}

TEST_CASE("paraproduct examples") {
  int n = 256;
  Field one = Field::constant(n, 1.0);
  Field u = Field::mode(n, -1) + Field::mode(n, 0, 5.0);
  CHECK(max_diff(paraproduct(one, u), Field::mode(n, -1)) < 1e-15);
  CHECK(max_diff(paraproduct(Field::mode(n, -1), Field::mode(n, -64)), Field::mode(n, -65)) < 1e-15);
}

TEST_CASE("balanced part") {
  int n = 64;
  Field a = random_field(n, 3, 15), u = random_field(n, 4, 15);
  CHECK(max_coeff(balanced(a, Field(n))) == 0);
  CHECK(max_diff(mul(a, u), paraproduct(a, u) + paraproduct(u, a) + balanced(a, u)) < 1e-12);
  Field pi = balanced(Field::mode(n, -8), Field::mode(n, -9));
  CHECK(std::abs(pi(-17) - 1.0) < 1e-14);
}

TEST_CASE("bilinear apply") {
  int n = 64;
  Field u = random_field(n, 5, 15), v = random_field(n, 6, 15);
  BilinearSymbol one{"one", Region::full, [](double, double) { return cplx(1); }};
  CHECK(max_diff(bilinear_apply(one, u, v), mul(u, v)) < 1e-12);
  BilinearSymbol xi{"xi", Region::full, [](double p, double) { return cplx(0, p); }};
  CHECK(max_diff(bilinear_apply(xi, u, v), mul(derivative(u), v)) < 1e-12);
  BilinearSymbol lh{"lh", Region::holo_lowhigh, [](double, double) { return cplx(1); }};
  Field big(256);
  CHECK(max_diff(bilinear_apply(lh, Field::mode(256, -1), Field::mode(256, -64)), Field::mode(256, -65)) < 1e-15);
  // mixed kinds conjugate u and keep negative output frequencies only
  BilinearSymbol mx{"mx", Region::mixed_lowhigh, [](double, double) { return cplx(2); }};
  Field o = bilinear_apply(mx, Field::mode(256, -1, kI), Field::mode(256, -64));
  CHECK(std::abs(o(-63) - cplx(0, -2)) < 1e-15);
  Field o2 = bilinear_apply(mx, Field::mode(256, -64), Field::mode(256, -1));
  CHECK(max_coeff(o2) == 0);
}

TEST_CASE("norms") {
  int n = 128;
  CHECK(sobolev_norm(Field::mode(n, -1), 1) == doctest::Approx(2 * std::sqrt(kPi)));
  CHECK(zygmund_norm(Field(n), 0.5) == 0);
  CHECK(zygmund_norm(Field::mode(n, -4), 1) == doctest::Approx(4));
  Field f = random_field(n, 7), g = random_field(n, 8);
  double a = sobolev_norm(f, 1.5), b = sobolev_norm(g, 1);
  CHECK(product_norm(f, g, 1) == doctest::Approx(std::hypot(a, b)));
  CHECK(zygmund_norm(f, 0.5) <= zygmund_norm(f, 1));
}

TEST_CASE("para commutator") {
  int n = 128;
  Field f = random_field(n, 9, 4), u = random_field(n, 10);
  CHECK(max_coeff(para_commutator(f, f, u)) < 1e-13);
  // single low modes acting on a high mode: both orders give the same chain
  Field c = para_commutator(Field::mode(n, -1), Field::mode(n, -2), Field::mode(n, -40));
  double expect = chi_ref(-1, -42) * chi_ref(-2, -40) - chi_ref(-2, -41) * chi_ref(-1, -40);
  CHECK(std::abs(c(-43) - expect) < 1e-15);
}
