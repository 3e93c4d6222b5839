#include "holowave/spectral.hh"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace hw {

namespace {

// Plans are created once per (size, direction) and reused through the
// new-array execute interface, which is thread safe. Only creation locks.
struct PlanCache {
  std::mutex mu;
  std::map<std::pair<int, int>, fftw_plan> plans;

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_pair(n, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    cvec a(n), b(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans[key] = p;
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void fft(cvec& in, cvec& out, int sign) {
  int n = static_cast<int>(in.size());
  out.resize(n);
  fftw_execute_dft(cache().get(n, sign), reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void GridSpec::validate() const {
  if (n_modes < 16 || !is_pow2(n_modes))
    throw std::invalid_argument("grid.n_modes must be a power of two >= 16");
  if (dealias_pad < 2) throw std::invalid_argument("grid.dealias_pad must be >= 2");
}

Field::Field(int n) : n_(n), c_(n, 0.0) {
  if (n < 2 || n % 2) throw std::invalid_argument("Field: n must be even");
}

Field::Field(int n, cvec coeffs) : n_(n), c_(std::move(coeffs)) {
  if (static_cast<int>(c_.size()) != n) throw std::invalid_argument("Field: size mismatch");
}

Field& Field::operator+=(const Field& o) {
  check_same_grid(*this, o);
  for (int i = 0; i < n_; ++i) c_[i] += o.c_[i];
  return *this;
}
Field& Field::operator-=(const Field& o) {
  check_same_grid(*this, o);
  for (int i = 0; i < n_; ++i) c_[i] -= o.c_[i];
  return *this;
}
Field& Field::operator*=(cplx s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Field Field::mode(int n, int k, cplx amp) {
  Field f(n);
  if (k < f.kmin() || k > f.kmax()) throw std::invalid_argument("Field::mode: k not representable");
  f(k) = amp;
  return f;
}

Field Field::constant(int n, cplx c) {
  Field f(n);
  f(0) = c;
  return f;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator-(Field a) { return a *= -1.0; }
Field operator*(cplx s, Field a) { return a *= s; }
Field operator*(Field a, cplx s) { return a *= s; }
Field operator*(double s, Field a) { return a *= s; }

void check_same_grid(const Field& a, const Field& b) {
  if (a.n() != b.n()) throw std::invalid_argument("grid mismatch");
}

Field to_spectral(const cvec& values) {
  int n = static_cast<int>(values.size());
  if (n < 2 || n % 2) throw std::invalid_argument("to_spectral: bad sample count");
  cvec in = values, out;
  fft(in, out, FFTW_FORWARD);
  for (auto& v : out) v /= n;
  return Field(n, std::move(out));
}

cvec to_physical(const Field& f) { return samples(f, f.n()); }

cvec samples(const Field& f, int m) {
  int n = f.n();
  if (m < n || m % 2) throw std::invalid_argument("samples: bad grid size");
  cvec in(m, 0.0), out;
  for (int k = f.kmin(); k <= f.kmax(); ++k) in[Field::slot(k, m)] = f(k);
  fft(in, out, FFTW_BACKWARD);
  return out;
}

Field truncate(const cvec& values, int n) {
  int m = static_cast<int>(values.size());
  if (m < n) throw std::invalid_argument("truncate: too few samples");
  cvec in = values, out;
  fft(in, out, FFTW_FORWARD);
  Field f(n);
  for (int k = -n / 2 + 1; k <= n / 2 - 1; ++k) f(k) = out[Field::slot(k, m)] / double(m);
  return f;
}

Field pointwise(const std::vector<const Field*>& in, const std::function<cplx(const cplx*)>& fn,
                int pad) {
  if (in.empty()) throw std::invalid_argument("pointwise: no inputs");
  int n = in[0]->n();
  for (auto* f : in) check_same_grid(*f, *in[0]);
  int m = pad * n;
  std::vector<cvec> s;
  s.reserve(in.size());
  for (auto* f : in) s.push_back(samples(*f, m));
  cvec out(m);
  cvec tup(in.size());
  for (int j = 0; j < m; ++j) {
    for (size_t i = 0; i < in.size(); ++i) tup[i] = s[i][j];
    out[j] = fn(tup.data());
  }
  return truncate(out, n);
}

Field mul(const Field& a, const Field& b) {
  return pointwise({&a, &b}, [](const cplx* v) { return v[0] * v[1]; });
}

Field mul(const Field& a, const Field& b, const Field& c) {
  return pointwise({&a, &b, &c}, [](const cplx* v) { return v[0] * v[1] * v[2]; });
}

Field conj(const Field& f) {
  Field g(f.n());
  for (int k = f.kmin() + 1; k <= f.kmax(); ++k) g(k) = std::conj(f(-k));
  return g;
}

Field re(const Field& f) { return 0.5 * (f + conj(f)); }
Field im(const Field& f) { return cplx(0, -0.5) * (f - conj(f)); }

Field multiplier(const Field& f, const std::function<cplx(int)>& symbol) {
  Field g(f.n());
  for (int k = f.kmin(); k <= f.kmax(); ++k) {
    cplx m = symbol(k);
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
      throw std::domain_error("multiplier: non-finite symbol value");
    g(k) = m * f(k);
  }
  return g;
}

Field hilbert(const Field& f) {
  return multiplier(f, [](int k) { return cplx(0, k > 0 ? -1 : (k < 0 ? 1 : 0)); });
}

Field project_holo(const Field& f) {
  return multiplier(f, [](int k) { return k < 0 ? 1.0 : (k == 0 ? 0.5 : 0.0); });
}

Field project_anti(const Field& f) {
  return multiplier(f, [](int k) { return k > 0 ? 1.0 : (k == 0 ? 0.5 : 0.0); });
}

Field derivative(const Field& f, int order) {
  if (order < 0) throw std::invalid_argument("derivative: negative order");
  return multiplier(f, [order](int k) { return std::pow(cplx(0, k), order); });
}

Field antiderivative(const Field& f) {
  return multiplier(f, [](int k) { return k == 0 ? cplx(0) : 1.0 / cplx(0, k); });
}

Field bracket_pow(const Field& f, double s) {
  return multiplier(f, [s](int k) { return std::pow(1.0 + double(k) * k, 0.5 * s); });
}

Field abs_pow(const Field& f, double s) {
  return multiplier(f, [s](int k) { return k == 0 ? 0.0 : std::pow(std::abs(double(k)), s); });
}

int lp_block_index(int k) {
  int a = std::abs(k);
  if (a <= 1) return 0;
  int j = 0;
  while ((1 << j) < a) ++j;
  return j;
}

int lp_block_count(int n) { return lp_block_index(n / 2) + 1; }

Field lp_block(const Field& f, int j) {
  if (j < 0) throw std::invalid_argument("lp_block: negative index");
  return multiplier(f, [j](int k) { return lp_block_index(k) == j ? 1.0 : 0.0; });
}

double l2(const Field& f) {
  double s = 0;
  for (auto& v : f.coeffs()) s += std::norm(v);
  return std::sqrt(s);
}

double max_coeff(const Field& f) {
  double m = 0;
  for (auto& v : f.coeffs()) m = std::max(m, std::abs(v));
  return m;
}

double holo_defect(const Field& f) {
  double num = 0, den = 0;
  for (int k = f.kmin(); k <= f.kmax(); ++k) {
    if (k == 0) continue;
    den += std::norm(f(k));
    if (k > 0) num += std::norm(f(k));
  }
  return den > 0 ? std::sqrt(num / den) : 0.0;
}

double sup_norm(const Field& f, int oversample) {
  double m = 0;
  for (auto& v : samples(f, oversample * f.n())) m = std::max(m, std::abs(v));
  return m;
}

double min_abs(const Field& f, int oversample) {
  double m = INFINITY;
  for (auto& v : samples(f, oversample * f.n())) m = std::min(m, std::abs(v));
  return m;
}

cplx integral(const Field& f) { return 2 * kPi * f(0); }

cplx integral_product(const Field& a, const Field& b) {
  check_same_grid(a, b);
  cplx s = 0;
  for (int k = a.kmin() + 1; k <= a.kmax(); ++k) s += a(k) * b(-k);
  return 2 * kPi * s;
}

void CutoffParams::validate() const {
  if (!(0 < eps1 && eps1 < eps2 && eps2 < 1))
    throw std::invalid_argument("cutoff: need 0 < eps1 < eps2 < 1");
  if (transition < 1) throw std::invalid_argument("cutoff: transition order must be >= 1");
}

double smoothstep(double x, int order) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  double s = 0;
  for (int j = 0; j <= order; ++j)
    s += binom(order + j, j) * binom(2 * order + 1, order - j) * std::pow(-x, j);
  return std::pow(x, order + 1) * s;
}

double chi1(double t1, double t2, const CutoffParams& cp) {
  double a = std::abs(t1), b = std::abs(t2);
  if (b == 0) return 0.0;
  double rho = a / b;
  if (rho <= cp.eps1) return 1.0;
  if (rho >= cp.eps2) return 0.0;
  return 1.0 - smoothstep(std::log(rho / cp.eps1) / std::log(cp.eps2 / cp.eps1), cp.transition);
}

double chi2(double t1, double t2, const CutoffParams& cp) {
  return 1.0 - chi1(t1, t2, cp) - chi1(t2, t1, cp);
}

double psi(double eta) { return eta == 0 ? 0.0 : 1.0; }

}  // namespace hw
