#include "holowave/dynamics.hh"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "holowave/energies.hh"

namespace hw {

namespace {

Field T(const Field& a, const Field& u) { return paraproduct(a, u); }
Field Pi(const Field& a, const Field& u) { return balanced(a, u); }
Field P(const Field& f) { return project_holo(f); }
Field Pb(const Field& f) { return project_anti(f); }
Field d1(const Field& f) { return derivative(f, 1); }
Field one(int n) { return Field::constant(n, 1.0); }

// coefficient built pointwise from bold W alone
Field coef(const Field& W, cplx (*fn)(cplx)) {
  return pointwise({&W}, [fn](const cplx* v) { return fn(v[0]); });
}

}  // namespace

FieldPair rhs_wq(const SurfaceState& s) {
  check_same_grid(s.W, s.Q);
  Field Wa = d1(s.W), Waa = derivative(s.W, 2), Qa = d1(s.Q);
  check_jacobian(Wa);
  int n = s.n();
  Field F = P(pointwise({&Qa, &Wa}, [](const cplx* v) {
    return (v[0] - std::conj(v[0])) / std::norm(1.0 + v[1]);
  }));
  Field Wt = -mul(F, one(n) + Wa);
  Field kin = P(pointwise({&Qa, &Wa}, [](const cplx* v) { return cplx(std::norm(v[0]) / std::norm(1.0 + v[1])); }));
  Field cap = P(pointwise({&Wa, &Waa}, [](const cplx* v) {
    cplx z = v[1] / (std::abs(1.0 + v[0]) * (1.0 + v[0]));
    return z - std::conj(z);
  }));
  Field Qt = -mul(F, Qa) + cplx(0, s.params.g) * s.W - kin - cplx(0, s.params.sigma) * cap;
  return {Wt, Qt};
}

WRRhs rhs_wr(const DiffState& d) { return rhs_wr(d, aux_fields(d)); }

WRRhs rhs_wr(const DiffState& d, const AuxFields& x) {
  int n = d.n();
  double g = d.params.g, sig = d.params.sigma;
  Field opW = one(n) + d.Wd;
  WRRhs o;
  o.Wt = -mul(x.b, x.Wa) - mul(opW, x.omYb, x.Ra) + mul(opW, x.M);
  // Z = J^{-1/2} (1 - Y) W_alpha
  Field Z = pointwise({&d.Wd, &x.Wa}, [](const cplx* v) {
    return v[1] / (std::abs(1.0 + v[0]) * (1.0 + v[0]));
  });
  o.Rt = -mul(x.b, x.Ra) + kI * mul(g * d.Wd - x.a, x.omY) +
         cplx(0, sig) * mul(x.omY, d1(P(conj(Z)) - P(Z)));
  o.anti_defect_W = holo_defect(o.Wt);
  o.anti_defect_R = holo_defect(o.Rt);
  return o;
}

Field op_L(const Field& w, const AuxFields& x) {
  Field wa = d1(w);
  return d1(mul(x.Jmh, wa)) - kI * mul(x.c, wa) - kI * mul(P(d1(x.c)), w);
}

Field op_Lpara(const Field& w, const AuxFields& x) { return d1(T(x.Jmh, d1(w))); }

LinState rhs_linearized(const LinState& l, const DiffState& bg) {
  return rhs_linearized(l, bg, aux_fields(bg));
}

LinState rhs_linearized(const LinState& l, const DiffState& bg, const AuxFields& x) {
  const Field& w = l.w;
  const Field& r = l.r;
  const Field& W = bg.Wd;
  const Field& R = bg.R;
  double g = bg.params.g, sig = bg.params.sigma;
  int n = bg.n();
  Field wa = d1(w), waa = derivative(w, 2), ra = d1(r);
  Field Rb = conj(R);
  Field A = ra + mul(x.Ra, w);
  Field B = mul(Rb, wa);
  Field m = pointwise({&W, &A, &B}, [](const cplx* v) {
    cplx z = 1.0 + v[0];
    return v[1] / std::norm(z) + v[2] / (z * z);
  });
  Field nn = pointwise({&W, &Rb, &A}, [](const cplx* v) { return v[1] * v[2] / (1.0 + v[0]); });
  Field p = pointwise({&W, &x.Wa, &wa, &waa}, [](const cplx* v) {
    cplx z = 1.0 + v[0];
    double aj = std::abs(z);
    // coefficient 3/2 on W_alpha w_alpha / (J^{1/2} (1+W)^2): the exact linearization
    return v[3] / (aj * z) - (1.5 * v[1] / (aj * z * z) - std::conj(v[1]) / (2 * aj * aj * aj)) * v[2];
  });
  Field RYab = mul(R, conj(d1(x.Y)));
  Field X = P(RYab);
  Field G0 = mul(one(n) + W, P(conj(m)) + Pb(m)) + mul(w, Pb(mul(x.Ra, conj(x.Y)))) - T(X, w);
  LinState o;
  // P b_alpha w read as (P b_alpha) w: the true linearization of the CWW flow
  o.w = -P(mul(x.b, wa)) - P(mul(x.omYb, ra)) - P(mul(P(d1(x.b)), w)) +
        P(G0 - T(w, RYab) - Pi(w, X));
  Field TTa = T(x.omY, T(x.a, w));
  Field K0 = Pb(nn) - P(conj(nn)) + cplx(0, sig) * P(conj(p)) + kI * TTa;
  o.r = -P(mul(x.b, ra)) - cplx(0, sig) * P(mul(x.omY, op_L(w, x))) + cplx(0, g) * P(mul(x.omY, w)) +
        P(K0) + kI * P(mul(x.a, w, x.omY)) - kI * TTa;
  return o;
}

LinState rhs_para_linear(const LinState& l, const DiffState& bg) {
  return rhs_para_linear(l, bg, aux_fields(bg));
}

LinState rhs_para_linear(const LinState& l, const DiffState& bg, const AuxFields& x) {
  double g = bg.params.g, sig = bg.params.sigma;
  Field wa = d1(l.w), ra = d1(l.r);
  LinState o;
  o.w = -T(x.b, wa) - T(x.omYb, ra) - 0.5 * T(d1(x.b), l.w);
  o.r = -T(x.b, ra) - cplx(0, sig) * T(x.omY, op_Lpara(l.w, x)) + cplx(0, g) * T(x.omY, l.w);
  return o;
}

LinState lin_to_good(const LinState& wq, const DiffState& bg) {
  return {wq.w, wq.r - mul(bg.R, wq.w)};
}

LinState lin_from_good(const LinState& wr, const DiffState& bg) {
  return {wr.w, wr.r + mul(bg.R, wr.w)};
}

// ---------------------------------------------------------------------------
// paradifferential reduction of the WR system

ReductionResidual para_reduction_wr(const DiffState& d) {
  AuxFields x = aux_fields(d);
  WRRhs rr = rhs_wr(d, x);
  Field Wt = P(rr.Wt), Rt = P(rr.Rt);
  const Field& W = d.Wd;
  const Field& R = d.R;
  double g = d.params.g, sig = d.params.sigma;
  Field Wb = conj(W), Rb = conj(R), Rab = conj(x.Ra), Waab = conj(x.Waa);

  Field cR = coef(W, [](cplx w) { return (1.0 + w) / (1.0 + std::conj(w)); });
  Field c2 = pointwise({&W, &x.Wa}, [](const cplx* v) {
    cplx zb = 1.0 + std::conj(v[0]);
    return v[1] / zb - (1.0 + v[0]) * std::conj(v[1]) / (zb * zb);
  });
  Field c4 = coef(W, [](cplx w) {
    cplx zb = 1.0 + std::conj(w);
    return (1.0 + w) / (zb * zb);
  });
  Field TYbR = T(x.omYb, R) + T(x.omY, Rb);
  Field calG = -T(x.b, x.Wa) - T(c2, R) - T(T(x.omYb, x.Ra) + T(x.omY, Rab), W) +
               T(c4, P(d1(Pi(Wb, R)))) - P(d1(Pi(TYbR, W)));

  Field cK = coef(W, [](cplx w) { return 1.0 / (std::abs(1.0 + w) * (1.0 + w) * (1.0 + w)); });
  Field c3 = coef(W, [](cplx w) { return 1.0 / (std::abs(1.0 + w) * std::pow(1.0 + w, 3)); });
  Field c3Wa = pointwise({&W, &x.Wa}, [](const cplx* v) {
    return v[1] / (std::abs(1.0 + v[0]) * std::pow(1.0 + v[0], 3));
  });
  Field c13 = coef(W, [](cplx w) { return 1.0 / (std::pow(std::abs(1.0 + w), 3) * (1.0 + w)); });
  Field cap = 3.0 * kI * T(c3Wa, x.Wa) + 2.5 * kI * T(T(c3, x.Waa), W) -
              0.5 * kI * T(T(c13, Waab), W) + 2.5 * kI * T(c3, Pi(W, x.Waa)) +
              1.5 * kI * T(c3, Pi(x.Wa, x.Wa)) + 0.5 * kI * T(c13, P(Pi(Wb, x.Waa))) -
              0.5 * kI * T(c13, P(Pi(Waab, W)));
  Field calK = sig * cap - T(x.b, x.Ra) - T(T(x.omYb, x.Ra), R) - T(T(x.omY, Rab), R) -
               Pi(x.Ra, T(x.omYb, R)) - T(x.omY, P(d1(Pi(Rb, R))));

  ReductionResidual o;
  o.G = Wt + T(cR, x.Ra) - calG;
  o.K = Rt + cplx(0, sig) * T(cK, x.Waa) - calK - cplx(0, g) * x.Y;
  o.norm = product_norm(o.G, o.K, 1.0);
  return o;
}

// ---------------------------------------------------------------------------
// para-material derivative identities

const ResidualEntry& ResidualReport::at(const std::string& name) const {
  for (auto& e : entries)
    if (e.name == name) return e;
  throw std::out_of_range("no residual named " + name);
}

namespace {

ResidualEntry entry(const std::string& name, const Field& res, const Field& lead) {
  return {name, sobolev_norm(res, 1.0), zygmund_norm(res, 0.5), sobolev_norm(lead, 1.0)};
}

// d/dt J^s = s J^{s-1} 2 Re(W_t (1 + Wbar))
Field dt_Js(const Field& W, const Field& Wt, double s) {
  return pointwise({&W, &Wt}, [s](const cplx* v) {
    cplx z = 1.0 + v[0];
    double J = std::norm(z);
    return cplx(s * std::pow(J, s - 1) * 2.0 * (v[1] * std::conj(z)).real());
  });
}

}  // namespace

ResidualReport para_material_residuals(const DiffState& d, double s2) {
  AuxFields x = aux_fields(d);
  WRRhs rr = rhs_wr(d, x);
  Field Wt = P(rr.Wt), Rt = P(rr.Rt);
  const Field& W = d.Wd;
  const Field& R = d.R;
  int n = d.n();
  double g = d.params.g, sig = d.params.sigma;
  auto Dt = [&](const Field& f, const Field& ft) { return ft + T(x.b, d1(f)); };
  ResidualReport rep;

  // undifferentiated W: W_t = -F (1 + bold W)
  Field Wu = antiderivative(W);
  Field Wut = -mul(x.F, one(n) + W);
  Field DtW = Dt(Wu, Wut);
  Field pY = P(mul(x.omYb, R));
  {
    Field lead = -T(one(n) + W, pY) - P(Pi(W, x.b));
    rep.entries.push_back(entry("ParaW", DtW - lead, lead));
  }
  {
    Field lead = -T(one(n) + W, T(x.omYb, R));
    rep.entries.push_back(entry("WParaMaterial", DtW - lead, lead));
  }
  {
    Field c = coef(W, [](cplx w) { return (1.0 + w) / (1.0 + std::conj(w)); });
    Field lead = -T(c, x.Ra);
    rep.entries.push_back(entry("WParaMat", Dt(W, Wt) - lead, lead));
  }
  {
    Field cK = coef(W, [](cplx w) { return 1.0 / (std::abs(1.0 + w) * (1.0 + w) * (1.0 + w)); });
    // the gravity term i g Y is linear in the data and is removed with the leading part
    Field lead = -cplx(0, sig) * T(cK, x.Waa) + cplx(0, g) * x.Y;
    rep.entries.push_back(entry("RParaMat", Dt(R, Rt) - lead, lead));
  }
  for (double s : {-0.5, s2}) {
    Field Js = jacobian_pow(W, s);
    Field Jst = dt_Js(W, Wt, s);
    Field lead1 = -s * mul(Js, d1(x.b));
    rep.entries.push_back(entry("JsParaMat(" + fmt17(s) + ")", Dt(Js, Jst) - lead1, lead1));
    Field c1 = pointwise({&W}, [s](const cplx* v) {
      cplx z = 1.0 + v[0];
      return std::pow(std::norm(z), s) / std::conj(z);
    });
    Field lead2 = -s * T(c1, x.Ra) - s * T(conj(c1), conj(x.Ra));
    rep.entries.push_back(entry("JsTimeDerivative(" + fmt17(s) + ")", Jst - lead2, lead2));
  }
  return rep;
}

CommutatorResidual commutator_residual(const DiffState& d, const Field& u) {
  AuxFields x = aux_fields(d);
  WRRhs rr = rhs_wr(d, x);
  Field Wt = P(rr.Wt);
  Field dJ = dt_Js(d.Wd, Wt, -0.5);
  Field ua = d1(u);
  Field Lu = op_Lpara(u, x);
  // [T_{D_t}, L] u for a time independent u
  Field comm = d1(T(dJ, ua)) + T(x.b, d1(Lu)) - op_Lpara(T(x.b, ua), x);
  Field c = coef(d.Wd, [](cplx w) { return 1.0 / (std::abs(1.0 + w) * (1.0 + std::conj(w))); });
  Field lead = -d1(T(re(T(c, x.Ra)), ua));
  Field extra = -T(d1(x.b), Lu);
  CommutatorResidual o;
  o.literal = sobolev_norm(comm - lead, 0.0);
  o.amended = sobolev_norm(comm - lead - extra, 0.0);
  o.leading = sobolev_norm(lead, 0.0);
  return o;
}

// ---------------------------------------------------------------------------
// time stepping

double cfl_limit(int n, const Params& p, double safety) {
  double k = n / 2.0;
  return safety / (std::sqrt(p.sigma) * std::pow(k, 1.5) + std::sqrt(p.g) * std::sqrt(k));
}

void check_cfl(double dt, int n, const Params& p, double safety) {
  if (!(dt > 0)) throw ConfigError("stepper.dt must be positive");
  double lim = cfl_limit(n, p, safety);
  if (dt > lim * (1 + 1e-12))
    throw ConfigError("stepper.dt = " + fmt17(dt) + " violates the CFL limit " + fmt17(lim));
}

State rhs(System sys, const State& u, const Params& p) {
  switch (sys) {
    case System::cww: {
      auto r = rhs_wq(SurfaceState{u[0], u[1], p});
      return {r.a, r.b};
    }
    case System::wr: {
      auto r = rhs_wr(DiffState{u[0], u[1], p});
      return {r.Wt, r.Rt};
    }
    case System::wr_lin:
    case System::wr_para: {
      DiffState bg{u[0], u[1], p};
      AuxFields x = aux_fields(bg);
      auto r = rhs_wr(bg, x);
      LinState l = sys == System::wr_lin ? rhs_linearized({u[2], u[3]}, bg, x)
                                         : rhs_para_linear({u[2], u[3]}, bg, x);
      return {r.Wt, r.Rt, l.w, l.r};
    }
  }
  throw std::logic_error("rhs: unknown system");
}

namespace {

State axpy(const State& a, double s, const State& b) {
  State o = a;
  for (size_t i = 0; i < o.size(); ++i) o[i] += s * b[i];
  return o;
}

// L u for the zero-linearized operator, k < 0 only
State apply_lin(const State& u, const Params& p) {
  State o;
  for (size_t i = 0; i + 1 < u.size(); i += 2) {
    Field a(u[i].n()), b(u[i].n());
    for (int k = u[i].kmin(); k < 0; ++k) {
      a(k) = cplx(0, -k) * u[i + 1](k);
      b(k) = cplx(0, p.g + p.sigma * k * k) * u[i](k);
    }
    o.push_back(a);
    o.push_back(b);
  }
  return o;
}

}  // namespace

State linear_propagate(const State& u, const Params& p, double t) {
  State o = u;
  for (size_t i = 0; i + 1 < u.size(); i += 2) {
    for (int k = u[i].kmin(); k < 0; ++k) {
      double ak = -k;
      double gk = p.g + p.sigma * ak * ak;
      double tau = std::sqrt(ak * gk);
      double c = std::cos(tau * t), s = std::sin(tau * t) / tau;
      cplx a = u[i](k), b = u[i + 1](k);
      o[i](k) = c * a + s * cplx(0, -k) * b;
      o[i + 1](k) = c * b + s * cplx(0, gk) * a;
    }
  }
  return o;
}

State step(System sys, const State& u, const Params& p, double h, Scheme scheme) {
  if (scheme == Scheme::rk4) {
    State k1 = rhs(sys, u, p);
    State k2 = rhs(sys, axpy(u, h / 2, k1), p);
    State k3 = rhs(sys, axpy(u, h / 2, k2), p);
    State k4 = rhs(sys, axpy(u, h, k3), p);
    State o = u;
    for (size_t i = 0; i < o.size(); ++i) o[i] += (h / 6) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return o;
  }
  // Lawson RK4: the stiff linear part is propagated exactly
  auto N = [&](const State& v) {
    State f = rhs(sys, v, p), l = apply_lin(v, p);
    for (size_t i = 0; i < f.size(); ++i) f[i] -= l[i];
    return f;
  };
  auto E = [&](const State& v, double t) { return linear_propagate(v, p, t); };
  State k1 = N(u);
  State k2 = N(E(axpy(u, h / 2, k1), h / 2));
  State k3 = N(axpy(E(u, h / 2), h / 2, k2));
  State k4 = N(axpy(E(u, h), h, E(k3, h / 2)));
  State a = E(k1, h), b = E(k2, h / 2), c = E(k3, h / 2);
  State o = E(u, h);
  for (size_t i = 0; i < o.size(); ++i) o[i] += (h / 6) * (a[i] + 2.0 * b[i] + 2.0 * c[i] + k4[i]);
  return o;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Trajectory::csv() const {
  std::ostringstream os;
  os << "t,E,P,A0,A1,holo_defect_W,holo_defect_R,Es,Elin\n";
  auto put = [&](const std::optional<double>& v) {
    os << ',';
    if (v) os << fmt17(*v);
  };
  for (auto& m : monitors) {
    os << fmt17(m.t);
    put(m.E), put(m.P), put(m.A0), put(m.A1), put(m.holo_W), put(m.holo_R), put(m.Es), put(m.Elin);
    os << '\n';
  }
  return os.str();
}

Monitors monitor(System sys, const State& u, const Params& p, double t, const MonitorConfig& mc) {
  Monitors m;
  m.t = t;
  DiffState d;
  if (sys == System::cww) {
    SurfaceState s{u[0], u[1], p};
    m.E = conserved_energy(s);
    m.P = conserved_momentum(s);
    d = differentiate_state(s);
  } else {
    d = DiffState{u[0], u[1], p};
  }
  ControlNorms cn = control_norms(d);
  m.A0 = cn.a0;
  m.A1 = cn.a1;
  m.holo_W = holo_defect(u[0]);
  m.holo_R = holo_defect(u[1]);
  if (mc.energy_s) m.Es = modified_energy(d, mc.s).total;
  if (sys == System::wr_lin || sys == System::wr_para) m.Elin = linearized_energy({u[2], u[3]}, d);
  return m;
}

namespace {
bool finite(const State& u) {
  for (auto& f : u)
    for (auto& v : f.coeffs())
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}
}  // namespace

Trajectory simulate(System sys, const State& u0, const Params& p, const StepperConfig& cfg,
                    const MonitorConfig& mc) {
  p.validate();
  int n = u0.at(0).n();
  double dt = cfg.dt > 0 ? cfg.dt : 0.5 * cfl_limit(n, p, cfg.cfl_safety);
  check_cfl(dt, n, p, cfg.cfl_safety);
  if (!(cfg.t_end >= 0)) throw ConfigError("stepper.t_end must be >= 0");
  long nsteps = static_cast<long>(std::ceil(cfg.t_end / dt - 1e-9));
  if (nsteps > 0) dt = cfg.t_end / nsteps;
  Trajectory tr;
  State u = u0;
  auto snap = [&](double t) {
    tr.times.push_back(t);
    tr.states.push_back(u);
    tr.monitors.push_back(monitor(sys, u, p, t, mc));
  };
  snap(0.0);
  for (long i = 1; i <= nsteps; ++i) {
    State v = step(sys, u, p, dt, cfg.scheme);
    if (cfg.reproject || cfg.remove_mean) {
      for (auto& f : v) {
        if (cfg.reproject)
          for (int k = 1; k <= f.kmax(); ++k) f(k) = 0;
        if (cfg.remove_mean) f(0) = 0;
      }
    }
    if (!finite(v)) throw BlowUpError("non-finite state at t = " + fmt17(i * dt), u, (i - 1) * dt);
    u = std::move(v);
    bool last = i == nsteps;
    if (last || (cfg.snapshot_every > 0 && i % cfg.snapshot_every == 0)) snap(i * dt);
  }
  return tr;
}

double dispersion_check(int k, const Params& p) {
  if (k >= 0) throw std::invalid_argument("dispersion_check: k must be negative");
  double a = -k;
  return std::sqrt(p.g * a + p.sigma * a * a * a);
}

}  // namespace hw
