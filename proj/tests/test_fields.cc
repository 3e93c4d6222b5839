#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "holowave/fields.hh"

using namespace hw;

namespace {

Field band(int n, int seed, int kmin, int kmax, double amp) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Field f(n);
  for (int k = kmin; k <= kmax; ++k) f(k) = amp * cplx(nd(rng), nd(rng));
  return f;
}

double max_diff(const Field& a, const Field& b) { return max_coeff(a - b); }

// physical samples of a field on m points
double sample_sum(const Field& f, int m, const std::function<double(cplx)>& fn) {
  double s = 0;
  for (int j = 0; j < m; ++j) {
    double a = 2 * kPi * j / m;
    cplx v = 0;
    for (int k = f.kmin(); k <= f.kmax(); ++k) v += f(k) * std::exp(kI * double(k) * a);
    s += fn(v);
  }
  return s * 2 * kPi / m;
}

}  // namespace

TEST_CASE("differentiate state") {
  int n = 32;
  double e = 0.01;
  Params p;
  DiffState z = differentiate_state({Field(n), Field(n), p});
  CHECK(max_coeff(z.Wd) == 0);
  CHECK(max_coeff(z.R) == 0);
  DiffState a = differentiate_state({Field::mode(n, -1, e), Field(n), p});
  CHECK(max_diff(a.Wd, Field::mode(n, -1, cplx(0, -e))) < 1e-17);
  CHECK(max_coeff(a.R) == 0);
  DiffState b = differentiate_state({Field(n), Field::mode(n, -1, e), p});
  CHECK(max_diff(b.R, Field::mode(n, -1, cplx(0, -e))) < 1e-17);
  CHECK_THROWS_AS(differentiate_state({Field::mode(n, -1, 0.95), Field(n), p}), DegeneracyError);
}

TEST_CASE("aux fields") {
  int n = 32;
  double e = 0.01;
  Params p;
  AuxFields z = aux_fields({Field(n), Field(n), p});
  CHECK(max_coeff(z.Y) == 0);
  CHECK(max_diff(z.J, Field::constant(n, 1.0)) < 1e-15);
  for (const Field* f : {&z.a, &z.b, &z.M, &z.c, &z.F}) CHECK(max_coeff(*f) == 0);

  AuxFields w = aux_fields({Field::mode(n, -1, e), Field(n), p});
  // J = 1 + 2 e cos + e^2
  Field J = Field::constant(n, 1 + e * e) + Field::mode(n, 1, e) + Field::mode(n, -1, e);
  CHECK(max_diff(w.J, J) < 1e-15);
  for (const Field* f : {&w.a, &w.b, &w.M, &w.F}) CHECK(max_coeff(*f) < 1e-18);

  // W = 0, R = e e^{-i alpha}: a = i(Pbar[Rbar R_a] - P[R Rbar_a]) and R Rbar_a = i e^2
  AuxFields r = aux_fields({Field(n), Field::mode(n, -1, e), p});
  CHECK(std::abs(r.a(0) - e * e) < 1e-17);
  CHECK(max_diff(r.b, Field::mode(n, -1, e) + Field::mode(n, 1, e)) < 1e-17);
}

TEST_CASE("aux field identities on a random state") {
  int n = 64;
  Params p;
  DiffState d{band(n, 1, -6, -1, 0.005), band(n, 2, -6, -1, 0.005), p};
  AuxFields x = aux_fields(d);
  CHECK(max_diff(x.M, x.M_alt) < 1e-12);
  CHECK(max_coeff(im(x.a)) < 1e-16);
  // a = i(conj(X) - X) = 2 Im X with X = P[R Rbar_a]
  CHECK(max_diff(re(x.a), 2.0 * x.a_alt) < 1e-16);
  // Y = W / (1 + W) sampled directly
  for (double a : {0.3, 2.0}) {
    cplx W = 0, Y = 0;
    for (int k = -n / 2; k < n / 2; ++k) {
      W += d.Wd(k) * std::exp(kI * double(k) * a);
      Y += x.Y(k) * std::exp(kI * double(k) * a);
    }
    CHECK(std::abs(Y - W / (1.0 + W)) < 1e-12);
  }
}

TEST_CASE("b from either set of variables") {
  int n = 128;
  Params p;
  SurfaceState s{band(n, 3, -5, -1, 0.005), band(n, 4, -5, -1, 0.005), p};
  AuxFields x = aux_fields(differentiate_state(s));
  Field b = b_from_surface(s);
  CHECK(max_diff(b, x.b) <= 1e-10 * max_coeff(b));
  CHECK(max_diff(F_from_surface(s), x.F) <= 1e-10 * max_coeff(x.F));
}

TEST_CASE("energy and momentum") {
  int n = 32;
  double e = 0.01;
  Params p{2.0, 3.0};
  CHECK(conserved_energy({Field(n), Field(n), p}) == 0);
  CHECK(conserved_momentum({Field(n), Field(n), p}) == 0);
  // kinetic only: Re int -i Q Qbar_a = 2 pi |k| |Q^(k)|^2
  double kin = conserved_energy({Field(n), Field::mode(n, -1, e), p});
  CHECK(kin == doctest::Approx(2 * kPi * e * e).epsilon(1e-12));
  // capillary part against direct quadrature at g = 0
  Params q{0.0, 1.0};
  Field W = Field::mode(n, -1, e);
  Field Wa = derivative(W);
  double cap = 4 * sample_sum(Wa, 64, [](cplx w) { return std::abs(1.0 + w) - 1 - w.real(); });
  CHECK(conserved_energy({W, Field(n), q}) == doctest::Approx(cap).epsilon(1e-10));
  // equal to sigma |w|^2_{H1 dot} up to O(e)
  CHECK(std::abs(cap / quadratic_energy({W, Field(n), q}) - 1) < 10 * e);
  // gravity as the height form 2 g (Im W)^2 (1 + Re W_a)
  Params gr{1.0, 1e-300};
  double hq = 0;
  for (int j = 0; j < 64; ++j) {
    double a = 2 * kPi * j / 64;
    cplx w = e * std::exp(-kI * a), wa = -kI * w;
    hq += 2 * w.imag() * w.imag() * (1 + wa.real());
  }
  hq *= 2 * kPi / 64;
  CHECK(energy_variant({W, Field(n), gr}, -kI, 0.0, true) == doctest::Approx(hq).epsilon(1e-12));
  // Q = i W: the integrand is i d(|W|^2)/da and integrates to zero
  CHECK(std::abs(conserved_momentum({W, kI * W, p})) < 1e-18);
  // Q = W: -i int (W Wbar_a - Wbar W_a) = -i (2 pi)(2 i e^2) = 4 pi e^2
  CHECK(conserved_momentum({W, W, p}) == doctest::Approx(4 * kPi * e * e).epsilon(1e-12));
}

TEST_CASE("control norms") {
  int n = 128;
  Params p;
  ControlNorms z = control_norms({Field(n), Field(n), p});
  CHECK(z.a0 == 0);
  CHECK(z.a1 == 0);
  CHECK(z.a32 == 0);
  ControlNorms c = control_norms({Field::mode(n, -1, 0.01), Field(n), p});
  CHECK(c.a0 == doctest::Approx(0.01).epsilon(1e-10));
  ControlNorms h = control_norms({Field::mode(n, -64, 1.0), Field(n), p}, 0.01);
  CHECK(h.a1 / h.a0 == doctest::Approx(64));
  CHECK_THROWS(control_norms({Field(n), Field(n), p}, 0.5));
}

TEST_CASE("scaling") {
  int n = 32;
  Params p{1.0, 1.0};
  DiffState d{Field::mode(n, -2, 0.1), Field::mode(n, -2, 0.2), p};
  DiffState one = scale_state(d, 1.0);
  CHECK(max_diff(one.Wd, d.Wd) == 0);
  CHECK(one.params.g == 1.0);
  DiffState two = scale_state(d, 2.0);
  CHECK(max_diff(two.Wd, Field::mode(n, -4, 0.1)) == 0);
  CHECK(max_diff(two.R, Field::mode(n, -4, 0.2 * std::sqrt(2.0))) < 1e-16);
  CHECK(two.params.g == 4.0);
  CHECK_THROWS(scale_state(d, 3.0));
  CHECK_THROWS(scale_state({Field::mode(n, -12, 0.1), Field(n), p}, 2.0));
}

TEST_CASE("json round trip") {
  int n = 16;
  Params p{1.5, 0.5};
  SurfaceState s{band(n, 5, -4, -1, 0.1), band(n, 6, -4, -1, 0.1), p};
  SurfaceState t = surface_from_json(to_json(s));
  CHECK(max_diff(s.W, t.W) == 0);
  CHECK(max_diff(s.Q, t.Q) == 0);
  CHECK(t.params.g == 1.5);
  DiffState d = diff_from_json(to_json(differentiate_state(s)));
  CHECK(d.n() == n);
  nlohmann::json bad = to_json(s);
  bad["W"].erase(0);
  CHECK_THROWS(surface_from_json(bad));
  bad = to_json(s);
  bad["params"]["sigma"] = 0.0;
  CHECK_THROWS(surface_from_json(bad));
}
