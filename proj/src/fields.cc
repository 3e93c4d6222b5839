#include "holowave/fields.hh"

#include <cmath>

namespace hw {

void Params::validate() const {
  if (!(g >= 0)) throw std::invalid_argument("params.g must be >= 0");
  if (!(sigma > 0)) throw std::invalid_argument("params.sigma must be > 0");
}

DegeneracyError::DegeneracyError(double m)
    : std::runtime_error("Jacobian degeneracy: min |1+W_alpha| = " + std::to_string(m)),
      min_jacobian(m) {}

double check_jacobian(const Field& Wd) {
  double m = min_abs(Field::constant(Wd.n(), 1.0) + Wd, 2);
  if (!(m >= kDegeneracyThreshold)) throw DegeneracyError(m);
  return m;
}

DiffState differentiate_state(const SurfaceState& s, double* r_defect) {
  check_same_grid(s.W, s.Q);
  DiffState d;
  d.params = s.params;
  d.Wd = derivative(s.W);
  check_jacobian(d.Wd);
  Field Qa = derivative(s.Q);
  Field Rraw = pointwise({&Qa, &d.Wd}, [](const cplx* v) { return v[0] / (1.0 + v[1]); });
  if (r_defect) *r_defect = holo_defect(Rraw);
  d.R = project_holo(Rraw);
  return d;
}

Field jacobian_pow(const Field& Wd, double s) {
  return pointwise({&Wd}, [s](const cplx* v) { return cplx(std::pow(std::norm(1.0 + v[0]), s)); });
}

AuxFields aux_fields(const DiffState& d) {
  check_same_grid(d.Wd, d.R);
  check_jacobian(d.Wd);
  int n = d.n();
  const Field& W = d.Wd;
  const Field& R = d.R;
  Field one = Field::constant(n, 1.0);
  AuxFields x;
  x.Wa = derivative(W);
  x.Waa = derivative(W, 2);
  x.Ra = derivative(R);

  Field Yraw = pointwise({&W}, [](const cplx* v) { return v[0] / (1.0 + v[0]); });
  x.y_defect = holo_defect(Yraw);
  x.Y = project_holo(Yraw);
  x.J = jacobian_pow(W, 1.0);
  x.Jmh = jacobian_pow(W, -0.5);
  x.Jm3h = jacobian_pow(W, -1.5);
  x.Jh = jacobian_pow(W, 0.5);
  x.omY = one - x.Y;
  x.omYb = conj(x.omY);

  Field Rb = conj(R), Rab = conj(x.Ra);
  Field RRab = project_holo(mul(R, Rab));
  x.a = kI * (project_anti(mul(Rb, x.Ra)) - RRab);
  x.a_alt = im(RRab);

  Field pb = project_holo(mul(x.omYb, R));
  x.b = pb + conj(pb);
  x.F = project_holo(mul(x.omYb, R) - mul(x.omY, Rb));

  x.M = mul(x.Ra, x.omYb) + mul(Rab, x.omY) - derivative(x.b);
  Field Ya = derivative(x.Y), Yb = conj(x.Y), Yab = conj(Ya);
  x.M_alt = project_anti(mul(Rb, Ya) - mul(x.Ra, Yb)) + project_holo(mul(R, Yab) - mul(Rab, x.Y));

  x.c = pointwise({&W, &x.Wa}, [](const cplx* v) {
    cplx z = v[1] / (std::abs(1.0 + v[0]) * (1.0 + v[0]));
    return cplx(2.0 * z.imag());
  });
  return x;
}

Field b_from_surface(const SurfaceState& s) {
  Field Wa = derivative(s.W), Qa = derivative(s.Q);
  Field p = project_holo(pointwise({&Qa, &Wa}, [](const cplx* v) { return v[0] / std::norm(1.0 + v[1]); }));
  return p + conj(p);
}

Field F_from_surface(const SurfaceState& s) {
  Field Wa = derivative(s.W), Qa = derivative(s.Q);
  return project_holo(pointwise({&Qa, &Wa}, [](const cplx* v) {
    return (v[0] - std::conj(v[0])) / std::norm(1.0 + v[1]);
  }));
}

double energy_variant(const SurfaceState& s, cplx kin, double csig, bool height_form) {
  const Field& W = s.W;
  const Field& Q = s.Q;
  Field Wa = derivative(W), Qa = derivative(Q);
  cplx e = kin * integral_product(Q, conj(Qa));
  double sig = s.params.sigma;
  e += csig * sig * integral(pointwise({&Wa}, [](const cplx* v) {
         return cplx(std::abs(1.0 + v[0]) - 1.0 - v[0].real());
       }));
  if (height_form)
    e += 2 * s.params.g * integral(pointwise({&W, &Wa}, [](const cplx* v) {
           return cplx(v[0].imag() * v[0].imag() * (1.0 + v[1].real()));
         }));
  else
    e += s.params.g * integral(pointwise({&W, &Wa}, [](const cplx* v) {
           return std::norm(v[0]) * (1.0 + v[1]);
         }));
  return e.real();
}

// Four times the physical energy: surface coefficient 4 sigma so that the
// quadratic part is sigma |W|^2_{H1 dot}, and gravity as 2g (Im W)^2 dx, which
// does not depend on the zero mode of W (see README).
double conserved_energy(const SurfaceState& s) { return energy_variant(s, -kI, 4.0, true); }

double conserved_energy_literal(const SurfaceState& s) { return energy_variant(s, 1.0, 2.0, false); }

double conserved_momentum(const SurfaceState& s) {
  Field Wa = derivative(s.W);
  cplx a = integral_product(s.Q, conj(Wa));
  cplx b = integral_product(conj(s.Q), Wa);
  cplx p = -kI * (a - b);
  double scale = std::abs(a) + std::abs(b);
  if (std::abs(p.imag()) > 1e-10 * scale + 1e-300)
    throw std::domain_error("conserved_momentum: imaginary residue");
  return p.real();
}

double quadratic_energy(const SurfaceState& s) {
  double e = 0;
  for (int k = s.W.kmin(); k <= s.W.kmax(); ++k) {
    double ak = std::abs(double(k));
    e += (s.params.sigma * ak * ak + s.params.g) * std::norm(s.W(k)) + ak * std::norm(s.Q(k));
  }
  return 2 * kPi * e;
}

ControlNorms control_norms(const DiffState& d, double eps) {
  if (!(eps > 0 && eps <= 0.25)) throw std::invalid_argument("control_norms: eps in (0, 1/4]");
  ControlNorms c;
  c.eps = eps;
  c.a0 = zygmund_norm(d.Wd, eps) + zygmund_norm(d.R, eps);
  c.a1 = zygmund_norm(d.Wd, 1 + eps) + zygmund_norm(d.R, 0.5 + eps);
  c.a32 = zygmund_norm(d.Wd, 1.5) + zygmund_norm(d.R, 1 + eps);
  return c;
}

Field dilate(const Field& f, double lambda) {
  double lg = std::log2(lambda);
  if (!(lambda > 0) || std::abs(lg - std::round(lg)) > 1e-12)
    throw std::invalid_argument("scale_state: lambda must be a power of two");
  double tot = l2(f), lost = 0;
  Field g(f.n());
  for (int k = f.kmin(); k <= f.kmax(); ++k) {
    if (f(k) == 0.0) continue;
    double kk = k * lambda;
    int ki = static_cast<int>(std::lround(kk));
    if (std::abs(kk - ki) > 1e-12 || ki <= g.kmin() || ki > g.kmax()) {
      lost += std::norm(f(k));
      continue;
    }
    g(ki) = f(k);
  }
  if (std::sqrt(lost) > 1e-13 * tot)
    throw std::invalid_argument("scale_state: dilation not representable on this lattice");
  return g;
}

DiffState scale_state(const DiffState& d, double lambda, double g_factor) {
  DiffState o;
  o.Wd = dilate(d.Wd, lambda);
  o.R = std::sqrt(lambda) * dilate(d.R, lambda);
  o.params = d.params;
  o.params.g = d.params.g * g_factor;
  return o;
}

DiffState scale_state(const DiffState& d, double lambda) {
  return scale_state(d, lambda, lambda * lambda);
}

nlohmann::json field_to_json(const Field& f) {
  nlohmann::json a = nlohmann::json::array();
  for (int k = f.kmin(); k <= f.kmax(); ++k) a.push_back({f(k).real(), f(k).imag()});
  return a;
}

Field field_from_json(const nlohmann::json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw std::invalid_argument("state JSON: coefficient list must have n_modes entries");
  Field f(n);
  int k = -n / 2;
  for (auto& e : j) f(k++) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
  return f;
}

namespace {
nlohmann::json head(int n, const Params& p) {
  return {{"grid", {{"n_modes", n}}}, {"params", {{"g", p.g}, {"sigma", p.sigma}}}};
}
Params params_of(const nlohmann::json& j) {
  Params p;
  p.g = j.at("params").at("g").get<double>();
  p.sigma = j.at("params").at("sigma").get<double>();
  p.validate();
  return p;
}
int n_of(const nlohmann::json& j) {
  GridSpec g;
  g.n_modes = j.at("grid").at("n_modes").get<int>();
  g.validate();
  return g.n_modes;
}
}  // namespace

nlohmann::json to_json(const SurfaceState& s) {
  auto j = head(s.n(), s.params);
  j["W"] = field_to_json(s.W);
  j["Q"] = field_to_json(s.Q);
  return j;
}

nlohmann::json to_json(const DiffState& d) {
  auto j = head(d.n(), d.params);
  j["Wd"] = field_to_json(d.Wd);
  j["R"] = field_to_json(d.R);
  return j;
}

SurfaceState surface_from_json(const nlohmann::json& j) {
  int n = n_of(j);
  return SurfaceState{field_from_json(j.at("W"), n), field_from_json(j.at("Q"), n), params_of(j)};
}

DiffState diff_from_json(const nlohmann::json& j) {
  int n = n_of(j);
  return DiffState{field_from_json(j.at("Wd"), n), field_from_json(j.at("R"), n), params_of(j)};
}

}  // namespace hw
