#include "chbreak/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chbreak/solver.hpp"

namespace chbreak {

namespace {

struct Neighbours {
  const TrackSample* prev;
  const TrackSample* mid;
  const TrackSample* next;
};

std::optional<Neighbours> neighbours_at(const CharacteristicTrack& track, double t) {
  const auto& s = track.samples();
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i].t == t) return Neighbours{&s[i - 1], &s[i], &s[i + 1]};
  }
  return std::nullopt;
}

// Three-point derivative at the middle of a non-uniform stencil.
double centered(double f0, double f1, double f2, double t0, double t1, double t2) {
  const double h1 = t1 - t0, h2 = t2 - t1;
  return -h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1 + h1 / (h2 * (h1 + h2)) * f2;
}

std::pair<double, double> time_derivatives(const Neighbours& n) {
  const double du = centered(n.prev->u, n.mid->u, n.next->u, n.prev->t, n.mid->t, n.next->t);
  const double dux = centered(n.prev->ux, n.mid->ux, n.next->ux, n.prev->t, n.mid->t, n.next->t);
  return {du, dux};
}

}  // namespace

TrackSample make_track_sample(double t, double q, double u, double ux) {
  TrackSample s{t, q, u, ux, u - ux, u + ux, std::numeric_limits<double>::quiet_NaN(), false};
  const double prod = -s.phi * s.psi;
  if (prod > 0.0) s.g = std::sqrt(prod);
  s.unreliable = std::abs(ux) >= kTrackReliableSlope;
  return s;
}

void CharacteristicTrack::push(TrackSample s, double half_length, double dx) {
  if (s.q < -half_length + 2.0 * dx || s.q > half_length - 2.0 * dx) edge_contaminated_ = true;
  samples_.push_back(s);
}

CharacteristicTrack CharacteristicTrack::start(double seed, const SolverState& initial) {
  const Grid& g = initial.u.grid();
  CharacteristicTrack tr;
  tr.seed_ = seed;
  const double u = interp(initial.u, seed);
  const double ux = interp(deriv(initial.u), seed);
  tr.push(make_track_sample(initial.t, seed, u, ux), g.half_length(), g.dx());
  return tr;
}

CharacteristicTrack CharacteristicTrack::start(double seed, const ParticleState& initial) {
  if (initial.size() == 0) throw PreconditionError("CharacteristicTrack: empty particle state");
  const double h = initial.label_spacing;
  const double lo = initial.label.front();
  double pos = std::round((seed - lo) / h);
  pos = std::clamp(pos, 0.0, static_cast<double>(initial.size() - 1));
  const auto j = static_cast<std::size_t>(pos);
  CharacteristicTrack tr;
  tr.seed_ = seed;
  tr.particle_ = j;
  tr.push(make_track_sample(initial.t, initial.q[j], initial.u[j], initial.ux[j]), -lo, h);
  return tr;
}

void CharacteristicTrack::advance(const SolverState& before, const SolverState& after) {
  if (particle_) throw PreconditionError("CharacteristicTrack: particle track advanced with a grid state");
  const Grid& g = after.u.grid();
  const double dt = after.t - before.t;
  const double q0 = samples_.back().q;
  const TrigInterpolant u0(before.u), u1(after.u);
  const double v0 = u0(q0);
  const double q_pred = q0 + dt * v0;
  const double q1 = q0 + 0.5 * dt * (v0 + u1(q_pred));
  const double ux = interp(deriv(after.u), q1);
  push(make_track_sample(after.t, q1, u1(q1), ux), g.half_length(), g.dx());
}

void CharacteristicTrack::advance(const ParticleState& after) {
  if (!particle_) throw PreconditionError("CharacteristicTrack: grid track advanced with a particle state");
  const std::size_t j = *particle_;
  push(make_track_sample(after.t, after.q[j], after.u[j], after.ux[j]), -after.label.front(), after.label_spacing);
}

std::optional<LemmaResidual> lemma_residual(const CharacteristicTrack& track, const SolverState& state,
                                            const DissipationProfile& profile) {
  const auto n = neighbours_at(track, state.t);
  if (!n) return std::nullopt;
  const auto [du, dux] = time_derivatives(*n);

  const Field& u = state.u;
  const Field ux = deriv(u);
  const Field f = u * u + 0.5 * (ux * ux) + h_eval(u);
  const double q = n->mid->q;
  const double pp = interp(conv_P_plus(f), q);
  const double pm = interp(conv_P_minus(f), q);
  const double uq = n->mid->u, uxq = n->mid->ux;
  const double lam = profile.lambda(state.t);

  LemmaResidual r;
  r.r_u = std::abs(du - (pp - pm - lam * uq));
  r.r_ux = std::abs(dux - (-0.5 * uxq * uxq - pp - pm + uq * uq + h_value(uq) - lam * uxq));
  return r;
}

std::optional<LemmaResidual> direct_form_residual(const CharacteristicTrack& track, const SolverState& state,
                                                  const DissipationProfile& profile) {
  const auto n = neighbours_at(track, state.t);
  if (!n) return std::nullopt;
  const auto [du, dux] = time_derivatives(*n);

  const Field& u = state.u;
  const Field ux = deriv(u);
  const Field material_u = rhs(u, state.t, profile) + u * ux;
  const Field material_ux = slope_rhs(u, state.t, profile) + u * second_deriv(u);
  const double q = n->mid->q;

  LemmaResidual r;
  r.r_u = std::abs(du - interp(material_u, q));
  r.r_ux = std::abs(dux - interp(material_ux, q));
  return r;
}

double diffeo_factor(const CharacteristicTrack& track) {
  const auto& s = track.samples();
  if (s.empty()) throw PreconditionError("diffeo_factor: empty track");
  double acc = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) acc += 0.5 * (s[i].t - s[i - 1].t) * (s[i].ux + s[i - 1].ux);
  return std::exp(acc);
}

}  // namespace chbreak
