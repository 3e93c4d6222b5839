// Periodic spectral fields on [0, 2pi) and the elementary Fourier-side operators.
#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace hw {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

constexpr double kPi = 3.14159265358979323846;
constexpr cplx kI{0.0, 1.0};

struct GridSpec {
  int n_modes = 128;
  int dealias_pad = 2;  // padding factor for nonlinear evaluation
  void validate() const;
};

bool is_pow2(int n);

// Coefficients u^(k) = (1/2pi) int u e^{-ik alpha}, k in [-n/2, n/2-1],
// stored in FFT order.
class Field {
 public:
  Field() = default;
  explicit Field(int n);
  Field(int n, cvec coeffs_fft_order);

  int n() const { return n_; }
  int kmin() const { return -n_ / 2; }
  int kmax() const { return n_ / 2 - 1; }
  static int slot(int k, int n) { return k >= 0 ? k : k + n; }
  static int freq(int i, int n) { return i < n / 2 ? i : i - n; }

  cplx& operator()(int k) { return c_[slot(k, n_)]; }
  cplx operator()(int k) const { return c_[slot(k, n_)]; }
  const cvec& coeffs() const { return c_; }
  cvec& coeffs() { return c_; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(cplx s);

  // single mode amp*e^{ik alpha}
  static Field mode(int n, int k, cplx amp = 1.0);
  static Field constant(int n, cplx c);

 private:
  int n_ = 0;
  cvec c_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator-(Field a);
Field operator*(cplx s, Field a);
Field operator*(Field a, cplx s);
Field operator*(double s, Field a);

void check_same_grid(const Field& a, const Field& b);

// transforms: physical samples at alpha_j = 2pi j/n
Field to_spectral(const cvec& values);
cvec to_physical(const Field& f);
// samples on an m-point grid (m >= n, zero padded); m must be even
cvec samples(const Field& f, int m);
// spectral coefficients of m samples, truncated to the n lattice; the
// Nyquist mode -n/2 is dropped so that conj() stays exact
Field truncate(const cvec& values, int n);

// dealiased pointwise evaluation: every input is sampled on the padded
// grid, fn maps the sample tuple to a value, the result is truncated
Field pointwise(const std::vector<const Field*>& in,
                const std::function<cplx(const cplx*)>& fn, int pad = 2);
Field mul(const Field& a, const Field& b);
Field mul(const Field& a, const Field& b, const Field& c);

// conj(f)^(k) = conj(f^(-k))
Field conj(const Field& f);
Field re(const Field& f);
Field im(const Field& f);

Field hilbert(const Field& f);
Field project_holo(const Field& f);  // P
Field project_anti(const Field& f);  // Pbar = I - P
Field derivative(const Field& f, int order = 1);
// inverse derivative on k != 0, zero mean
Field antiderivative(const Field& f);
Field multiplier(const Field& f, const std::function<cplx(int)>& symbol);
Field bracket_pow(const Field& f, double s);  // <D>^s = (1+k^2)^{s/2}
Field abs_pow(const Field& f, double s);      // |D|^s, zero at k = 0
Field lp_block(const Field& f, int j);
int lp_block_count(int n);                    // blocks needed to cover the lattice
int lp_block_index(int k);

// holomorphy defect |Pbar f| / |f| in l2 of coefficients (zero mode excluded)
double holo_defect(const Field& f);
double l2(const Field& f);  // sqrt(sum |f^(k)|^2)
double max_coeff(const Field& f);
double sup_norm(const Field& f, int oversample = 4);
double min_abs(const Field& f, int oversample = 4);
// exact quadrature of a product: int a*b dalpha
cplx integral(const Field& f);
cplx integral_product(const Field& a, const Field& b);

// cutoffs
struct CutoffParams {
  double eps1 = 1.0 / 20.0;
  double eps2 = 1.0 / 10.0;
  int transition = 1;  // smoothstep order; 1 is the cubic
  void validate() const;
};

double smoothstep(double x, int order = 1);
double chi1(double t1, double t2, const CutoffParams& cp = {});
double chi2(double t1, double t2, const CutoffParams& cp = {});
double psi(double eta);

}  // namespace hw
