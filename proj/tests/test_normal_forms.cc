#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "holowave/normal_forms.hh"

using namespace hw;

namespace {

double max_diff(const Field& a, const Field& b) { return max_coeff(a - b); }

Eigen::MatrixXd to_eigen(const LinearSystem& L) {
  Eigen::MatrixXd A(L.A.size(), L.A[0].size());
  for (size_t i = 0; i < L.A.size(); ++i)
    for (size_t j = 0; j < L.A[i].size(); ++j) A(i, j) = L.A[i][j];
  return A;
}

}  // namespace

TEST_CASE("catalog") {
  auto& cat = symbol_catalog();
  CHECK(cat.size() == 11);
  std::vector<std::string> names = {"full_hlh", "full_alh", "full_hhh", "full_ahh", "toy_cubic", "lin_bal1",
                                    "lin_bal2h", "lin_bal2a", "lin_lh1",  "lin_lh2h", "lin_lh2a"};
  for (auto& n : names) CHECK_NOTHROW(family(n));
  CHECK_THROWS(family("nope"));
  CHECK(family("full_hhh").part().symbols.size() == 3);
}

TEST_CASE("closed forms at a sample point") {
  double x = -1, e = -100;
  double D = 9 * x * x + 14 * x * e + 9 * e * e;
  CHECK(D == 91409);
  double c = -(3 * x * x * x + 6 * x * x * e + 11 * x * e * e + 6 * e * e * e) / (x * e * D);
  CHECK(family("full_hlh").part().sym("c").eval(x, e).real() == doctest::Approx(c).epsilon(1e-14));
  double z = x + e;
  double a = -3 * z * z * z * chi1(x, z) / (2 * D);
  CHECK(family("toy_cubic").part().sym("a").eval(x, e).real() * chi1(x, z) == doctest::Approx(a).epsilon(1e-14));
}

TEST_CASE("hand written low-high system") {
  // W_t + R_a quadratic terms removed by (W, R) -> (W + B(W,W) + C(R,R), R + A(R,W) + D(W,R))
  auto sys = [](double x, double e) {
    double s = x + e;
    Eigen::Matrix4d A;
    A << s, -x, e * e, 0, 0, e, -x * x, -s, e, 0, s * s, x, x * x, -s * s, 0, e * e;
    Eigen::Vector4d b(s, -x, -s, 3 * x * e + 2.5 * x * x);
    return std::make_pair(A, b);
  };
  const SymbolSet& hl = family("full_hlh").part();
  std::mt19937_64 rng(3);
  for (auto [p, q] : sample_support(hl, 100, rng)) {
    auto [A, b] = sys(p, q);
    Eigen::Vector4d s = A.fullPivLu().solve(b);
    const char* nm[] = {"a", "b", "c", "d"};
    for (int i = 0; i < 4; ++i) CHECK(hl.sym(nm[i]).eval(p, q).real() == doctest::Approx(s(i)).epsilon(1e-9));
  }
}

TEST_CASE("numerical solve of every system") {
  std::mt19937_64 rng(7);
  for (auto& f : symbol_catalog())
    for (auto& s : f.parts) {
      auto pts = sample_support(s, 200, rng);
      CHECK(pts.size() == 200);
      for (auto [p, q] : pts) {
        double X = s.cutoff(p, q);
        CHECK(X > 0);
        LinearSystem L = s.system(p, q, X);
        Eigen::MatrixXd A = to_eigen(L);
        Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(L.rhs.data(), L.rhs.size());
        std::vector<double> u = s.unknown_vector(s.symbols, p, q, X);
        Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(u.data(), u.size());
        if (A.rows() == A.cols()) {
          Eigen::VectorXd sol = A.fullPivLu().solve(b);
          double rel = (sol - v).cwiseAbs().maxCoeff() / (sol.cwiseAbs().maxCoeff() + 1e-300);
          INFO(f.name, " ", s.label, " at ", p, ", ", q);
          CHECK(rel < 1e-8);
        } else {
          // underdetermined symmetrized system: the closed forms must be a solution
          CHECK((A * v - b).cwiseAbs().maxCoeff() <= 1e-10 * (A.cwiseAbs() * v.cwiseAbs() + b.cwiseAbs()).maxCoeff());
        }
      }
    }
}

TEST_CASE("verify_family reports") {
  for (auto& f : symbol_catalog()) {
    FamilyReport r = verify_family(f, 1000, 11);
    INFO(f.name);
    CHECK(r.max_residual <= 1e-10);
    CHECK_FALSE(r.singular);
    CHECK(r.min_denominator > 0);
    bool has_printed = false;
    for (auto& s : f.parts) has_printed |= !s.printed.empty();
    if (has_printed) CHECK(r.max_residual_printed > 1e-3);
  }
  LinearSystem L{{{1, 0}, {0, 1}}, {1, 2}};
  CHECK(relative_residual(L, {1, 2}) == 0);
  CHECK(relative_residual(L, {1, 3}) > 0.1);
}

TEST_CASE("quadratic correction") {
  int n = 128;
  Params p;
  QuadCorrection z = quadratic_correction({Field(n), Field(n), p});
  for (const Field* f : {&z.W_hh, &z.R_hh, &z.W_lh, &z.R_lh}) CHECK(max_coeff(*f) == 0);
  // one low and one high mode: the low-high output is symbol times coefficients
  double e = 1e-4;
  DiffState d{Field::mode(n, -1, e) + Field::mode(n, -40, e), Field(n), p};
  QuadCorrection q = quadratic_correction(d);
  double b = family("full_hlh").part().sym("b").eval(-1, -40).real();
  CHECK(std::abs(q.W_lh(-41) - b * e * e) < 1e-2 * std::abs(b) * e * e);
  // the balanced cutoff chi2(xi, xi + eta) also takes the (high, low) ordering
  const SymbolSet& hh = family("full_hhh").part();
  double bhl = hh.sym("b").eval(-40, -1).real(), bll = hh.sym("b").eval(-1, -1).real();
  CHECK(chi2(-40, -41) == 1.0);
  CHECK(chi2(-1, -41) == 0.0);
  CHECK(std::abs(q.W_hh(-41) - bhl * e * e) < 1e-2 * std::abs(bhl) * e * e);
  CHECK(std::abs(q.W_hh(-2) - bll * e * e) < 1e-2 * std::abs(bll) * e * e);
  CHECK(max_coeff(q.R_hh) == 0);
}

TEST_CASE("linearized correction") {
  int n = 128;
  Params p;
  LinState l{Field::mode(n, -40), Field(n)};
  LinCorrection z = linearized_nf_correction(l, {Field(n), Field(n), p});
  CHECK(max_coeff(z.w()) == 0);
  CHECK(max_coeff(z.r()) == 0);
  double e = 1e-5;
  DiffState bg{Field::mode(n, -1, e), Field(n), p};
  LinCorrection c = linearized_nf_correction(l, bg);
  double hb = family("lin_lh1").part("h").sym("b").eval(-1, -40).real();
  double ab = family("lin_lh1").part("a").sym("b").eval(-1, -40).real();
  CHECK(std::abs(c.w_lh(-41) - hb * e) < 1e-3 * std::abs(hb) * e);
  CHECK(std::abs(c.w_lh(-39) - ab * e) < 1e-3 * std::abs(ab) * e);
  CHECK(max_coeff(c.w_bal) < 1e-3 * std::abs(hb) * e);
}

TEST_CASE("z variables") {
  int n = 32;
  Params p;
  ZVariables z0 = z_variables({Field(n), Field(n), p}, {Field(n), Field(n)});
  CHECK(max_coeff(z0.Zp) + max_coeff(z0.zm) == 0);
  ZVariables z = z_variables({Field::mode(n, -1), Field(n), p}, {Field(n), Field(n)});
  CHECK(max_diff(z.Zp, Field::mode(n, -1, kI)) < 1e-15);
  CHECK(max_diff(z.Zm, Field::mode(n, -1, -kI)) < 1e-15);
  Field R = Field::mode(n, -3, 0.2) + Field::mode(n, -7, cplx(0.1, 0.4));
  ZVariables y = z_variables({Field::mode(n, -2), R, p}, {Field(n), Field(n)});
  CHECK(max_diff(y.Zp + y.Zm, 2.0 * R) < 1e-15);
}
