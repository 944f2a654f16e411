#include "chbreak/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace chbreak {

namespace {

double sup_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double min_slope(const Field& u) {
  const Field ux = deriv(u);
  const auto v = ux.values();
  return *std::min_element(v.begin(), v.end());
}

ParticleState axpy(const ParticleState& s, const ParticleRates& r, double dt) {
  ParticleState o = s;
  for (std::size_t j = 0; j < s.size(); ++j) {
    o.q[j] += dt * r.q[j];
    o.u[j] += dt * r.u[j];
    o.ux[j] += dt * r.ux[j];
    o.jac[j] += dt * r.jac[j];
  }
  return o;
}

void rk4_combine(std::vector<double>& y, const std::vector<double>& k1, const std::vector<double>& k2,
                 const std::vector<double>& k3, const std::vector<double>& k4, double dt) {
  for (std::size_t j = 0; j < y.size(); ++j) y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

// Lands exactly on t_end when the step was clipped to it.
double advance_time(double t, double dt, double t_end) { return dt >= t_end - t ? t_end : t + dt; }

SolverState rk4_spectral(const SolverState& s, const DissipationProfile& p, double dt, double t_end) {
  const double t = s.t;
  const Field k1 = rhs(s.u, t, p);
  const Field k2 = rhs(s.u + (0.5 * dt) * k1, t + 0.5 * dt, p);
  const Field k3 = rhs(s.u + (0.5 * dt) * k2, t + 0.5 * dt, p);
  const Field k4 = rhs(s.u + dt * k3, t + dt, p);
  Field u = s.u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  require_finite(u, "step");
  return SolverState{advance_time(t, dt, t_end), std::move(u), dt, s.step_count + 1};
}

ParticleState rk4_particles(const ParticleState& s, const DissipationProfile& p, double dt, double t_end) {
  const double t = s.t;
  const auto k1 = particle_rhs(s, p.lambda(t));
  const auto k2 = particle_rhs(axpy(s, k1, 0.5 * dt), p.lambda(t + 0.5 * dt));
  const auto k3 = particle_rhs(axpy(s, k2, 0.5 * dt), p.lambda(t + 0.5 * dt));
  const auto k4 = particle_rhs(axpy(s, k3, dt), p.lambda(t + dt));
  ParticleState o = s;
  rk4_combine(o.q, k1.q, k2.q, k3.q, k4.q, dt);
  rk4_combine(o.u, k1.u, k2.u, k3.u, k4.u, dt);
  rk4_combine(o.ux, k1.ux, k2.ux, k3.ux, k4.ux, dt);
  rk4_combine(o.jac, k1.jac, k2.jac, k3.jac, k4.jac, dt);
  if (!o.is_finite()) throw NumericalError("step: non-finite particle state");
  o.t = advance_time(t, dt, t_end);
  o.dt_last = dt;
  o.step_count = s.step_count + 1;
  return o;
}

template <typename State, typename Rk4>
State step_with_halving(const State& s, const SolverConfig& cfg, double dt, Rk4 rk4, std::size_t* rejected) {
  while (true) {
    if (dt < cfg.dt_min) throw NumericalError("step: dt fell below dt_min");
    try {
      return rk4(s, cfg.profile, dt, cfg.t_end);
    } catch (const NumericalError&) {
      dt *= 0.5;
      if (rejected) ++*rejected;
    }
  }
}

double dt_rule(const SolverConfig& cfg, double dx, double sup_u, double m, double t) {
  return std::min({cfg.cfl_factor * dx / std::max(1.0, sup_u), cfg.slope_dt_factor / std::max(1.0, std::abs(m)),
                   cfg.t_end - t});
}

bool emit_due(std::size_t step_count, std::size_t stride) { return step_count % stride == 0; }

}  // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::spectral: return "spectral";
    case Scheme::lagrangian: return "lagrangian";
  }
  return "spectral";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "spectral") return Scheme::spectral;
  if (name == "lagrangian") return Scheme::lagrangian;
  return std::nullopt;
}

std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::reached_horizon: return "reached_horizon";
    case OutcomeKind::breaking_detected: return "breaking_detected";
    case OutcomeKind::dt_underflow: return "dt_underflow";
    case OutcomeKind::edge_decay_lost: return "edge_decay_lost";
    case OutcomeKind::resolution_lost: return "resolution_lost";
  }
  return "reached_horizon";
}

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw PreconditionError(std::string(name) + " must be positive and finite");
  };
  positive(half_length, "L");
  positive(cfl_factor, "cfl_factor");
  positive(slope_dt_factor, "c_m");
  positive(dt_min, "dt_min");
  positive(resolution_tol, "resolution_tol");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw PreconditionError("t_end must be non-negative and finite");
  if (!(m_stop < 0.0)) throw PreconditionError("m_stop must be negative");
  if (record_stride == 0) throw PreconditionError("record_stride must be at least 1");
  for (double s : seeds) {
    if (!(s >= -half_length && s < half_length)) throw PreconditionError("characteristic seed outside [-L, L)");
  }
  profile.validate(t_end);
}

SolverState initial_state(const SolverConfig& cfg) {
  const auto grid = Grid::make(cfg.half_length, cfg.n_points);
  return SolverState{0.0, make_datum(cfg.datum, grid), 0.0, 0};
}

DiagnosticsRecord make_record(const SolverState& s, const DissipationProfile& profile) {
  const Field ux = deriv(s.u);
  const auto v = ux.values();
  const auto it = std::min_element(v.begin(), v.end());
  DiagnosticsRecord r;
  r.t = s.t;
  r.E = h1_norm_sq(s.u);
  r.m = *it;
  r.x_argmin = s.u.grid().x(static_cast<std::size_t>(it - v.begin()));
  r.sup_abs_u = s.u.max_abs();
  r.dt = s.dt_last;
  r.lambda_int = profile.integral(s.t);
  return r;
}

DiagnosticsRecord make_record(const ParticleState& s, const DissipationProfile& profile) {
  const std::size_t k = particle_argmin_slope(s);
  DiagnosticsRecord r;
  r.t = s.t;
  r.E = particle_energy(s);
  r.m = s.ux[k];
  r.x_argmin = s.q[k];
  r.sup_abs_u = sup_abs(s.u);
  r.dt = s.dt_last;
  r.lambda_int = profile.integral(s.t);
  return r;
}

double choose_dt(const SolverState& s, const SolverConfig& cfg) {
  return dt_rule(cfg, s.u.grid().dx(), s.u.max_abs(), min_slope(s.u), s.t);
}

double choose_dt(const ParticleState& s, const SolverConfig& cfg) {
  return dt_rule(cfg, s.label_spacing, sup_abs(s.u), s.ux[particle_argmin_slope(s)], s.t);
}

SolverState step(const SolverState& s, const SolverConfig& cfg, std::size_t* rejected) {
  return step_with_halving(s, cfg, choose_dt(s, cfg), rk4_spectral, rejected);
}

ParticleState step(const ParticleState& s, const SolverConfig& cfg, std::size_t* rejected) {
  return step_with_halving(s, cfg, choose_dt(s, cfg), rk4_particles, rejected);
}

double spectral_tail_fraction(const Field& u) {
  const Grid& g = u.grid();
  std::vector<std::complex<double>> hat(g.spectrum_size());
  g.forward(u.values(), hat);
  const auto k = g.wavenumbers();
  const std::size_t n = g.size();
  double total = 0.0, tail = 0.0;
  for (std::size_t j = 0; j < hat.size(); ++j) {
    const double w = (j == 0 || j == n / 2) ? 1.0 : 2.0;
    const double e = w * std::norm(hat[j]) * (1.0 + k[j] * k[j]);
    total += e;
    if (4 * j > n && 3 * j <= n) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

namespace {

template <typename State>
struct Driver {
  const SolverConfig& cfg;
  const RunHooks& hooks;
  RunOutcome out;

  void emit(const DiagnosticsRecord& r, const State& s) {
    out.records.push_back(r);
    if constexpr (std::is_same_v<State, SolverState>) {
      if (hooks.on_spectral_state) hooks.on_spectral_state(r, s);
    } else {
      if (hooks.on_particle_state) hooks.on_particle_state(r, s);
    }
  }
};

bool edges_ok(const SolverState& s) { return s.u.edges_decayed(); }
bool edges_ok(const ParticleState& s) { return particle_edges_decayed(s); }

template <typename State>
RunOutcome drive(const SolverConfig& cfg, const RunHooks& hooks, State state) {
  Driver<State> d{cfg, hooks, {}};
  for (double seed : cfg.seeds) d.out.tracks.push_back(CharacteristicTrack::start(seed, state));

  DiagnosticsRecord rec = make_record(state, cfg.profile);
  d.emit(rec, state);

  auto finish = [&](OutcomeKind kind, bool emit_last) {
    if (emit_last && (d.out.records.empty() || d.out.records.back().t != rec.t)) d.emit(rec, state);
    d.out.kind = kind;
    d.out.t_final = state.t;
    d.out.steps = state.step_count;
    if constexpr (std::is_same_v<State, ParticleState>) {
      if (kind == OutcomeKind::breaking_detected) d.out.breaking_label = state.label[particle_argmin_slope(state)];
    }
    return std::move(d.out);
  };

  if (rec.m <= cfg.m_stop) return finish(OutcomeKind::breaking_detected, false);
  while (state.t < cfg.t_end) {
    State next = state;
    try {
      next = step(state, cfg, &d.out.rejected_steps);
    } catch (const NumericalError&) {
      return finish(OutcomeKind::dt_underflow, false);
    }
    for (auto& tr : d.out.tracks) {
      if constexpr (std::is_same_v<State, SolverState>) {
        tr.advance(state, next);
      } else {
        tr.advance(next);
      }
    }
    state = std::move(next);
    rec = make_record(state, cfg.profile);

    if (!edges_ok(state)) return finish(OutcomeKind::edge_decay_lost, true);
    if constexpr (std::is_same_v<State, SolverState>) {
      if (rec.m > cfg.m_stop && spectral_tail_fraction(state.u) > cfg.resolution_tol) {
        return finish(OutcomeKind::resolution_lost, true);
      }
    }
    if (rec.m <= cfg.m_stop) return finish(OutcomeKind::breaking_detected, true);
    if (emit_due(state.step_count, cfg.record_stride)) d.emit(rec, state);
  }
  return finish(OutcomeKind::reached_horizon, true);
}

}  // namespace

RunOutcome run(const SolverConfig& cfg, const RunHooks& hooks) {
  cfg.validate();
  SolverState s0 = initial_state(cfg);
  if (cfg.scheme == Scheme::spectral) return drive(cfg, hooks, std::move(s0));
  ParticleState p0 = make_particle_state(s0.u);
  return drive(cfg, hooks, std::move(p0));
}

}  // namespace chbreak
