#include "chbreak/cli/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "chbreak/riccati.hpp"

namespace chbreak::cli {

namespace {

TrackReport summarize_track(const CharacteristicTrack& tr) {
  TrackReport r;
  const auto& s = tr.samples();
  r.seed = tr.seed();
  r.n_samples = s.size();
  r.edge_contaminated = tr.edge_contaminated();
  r.q_final = s.back().q;
  r.ux_final = s.back().ux;
  r.rate = track_rate(tr);
  r.diffeo_factor = diffeo_factor(tr);
  r.sign_condition_initial = s.front().phi > 0.0 && s.front().psi < 0.0;
  r.sign_condition_kept = r.sign_condition_initial;
  r.g_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].unreliable) ++r.unreliable_samples;
    const bool signs = s[i].phi > 0.0 && s[i].psi < 0.0;
    if (!signs) r.sign_condition_kept = false;
    if (!std::isnan(s[i].g)) r.g_excess = std::max(r.g_excess, s[i].g + s[i].ux);
    if (i > 0 && signs && !s[i].unreliable && !s[i - 1].unreliable && !std::isnan(s[i - 1].g)) {
      r.g_max_decrease = std::max(r.g_max_decrease, (s[i - 1].g - s[i].g) / std::max(1.0, s[i - 1].g));
    }
  }
  if (!std::isfinite(r.g_excess)) r.g_excess = 0.0;
  return r;
}

ComparisonReport compare_with_omega(const std::vector<DiagnosticsRecord>& records, double delta, double K) {
  ComparisonReport c;
  c.delta = delta;
  c.omega0 = records.front().m;
  RiccatiOptions opt;
  for (const auto& r : records) {
    if (opt.sample_times.empty() || r.t > opt.sample_times.back()) opt.sample_times.push_back(r.t);
  }
  const double t_max = opt.sample_times.back();
  const auto sol = solve_omega(delta, K, c.omega0, t_max, opt);
  c.omega_blowup = sol.T_numeric();
  c.max_excess = -std::numeric_limits<double>::infinity();
  std::size_t j = 0;
  for (const auto& r : records) {
    while (j < sol.samples.size() && sol.samples[j].t < r.t) ++j;
    if (j == sol.samples.size()) break;
    if (sol.samples[j].t != r.t) continue;
    c.max_excess = std::max(c.max_excess, r.m - sol.samples[j].value);
    ++c.common_samples;
  }
  if (c.common_samples == 0) c.max_excess = 0.0;
  return c;
}

}  // namespace

InitialDatum resolve_datum(const RunConfig& cfg, bool* searched) {
  if (searched) *searched = false;
  if (!cfg.datum.search) return cfg.datum.build();
  const auto grid = Grid::make(cfg.grid.L, cfg.grid.N);
  const double delta = cfg.dissipation.build().delta_sup();
  const auto found =
      find_breaking_datum(cfg.datum.family, cfg.datum.amplitude, delta, *cfg.datum.search, grid, cfg.datum.center);
  if (!found) {
    throw PreconditionError("no width in the scan range satisfies the " + std::string(to_string(*cfg.datum.search)) +
                            " criterion for these parameters");
  }
  if (searched) *searched = true;
  return found->datum;
}

StudyResult run_study(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  StudyResult st;
  st.datum = resolve_datum(cfg, &st.searched);
  st.solver = cfg.solver_config(st.datum);
  st.solver.validate();

  const auto grid = Grid::make(cfg.grid.L, cfg.grid.N);
  const double delta = st.solver.profile.delta_sup();
  st.criteria = evaluate_criteria(st.datum, grid, delta, cfg.characteristics.x1);
  st.solver.seeds = cfg.characteristics.seeds;
  if (cfg.characteristics.track_x1) {
    st.x1_track = st.solver.seeds.size();
    st.solver.seeds.push_back(*st.criteria.x1);
  }

  const double K = st.criteria.K;
  st.budget.H_bound = K + 0.5 * delta * delta;
  auto account = [&](const SlopeBudget& b) {
    const double excess = b.m_prime - (-b.lambda * b.m - 0.5 * b.m * b.m + K);
    if (st.budget.evaluated == 0) st.budget.max_m_prime_excess = excess;
    st.budget.max_m_prime_excess = std::max(st.budget.max_m_prime_excess, excess);
    st.budget.max_abs_H = std::max(st.budget.max_abs_H, std::abs(b.H));
    ++st.budget.evaluated;
  };
  RunHooks hooks;
  hooks.on_spectral_state = [&](const DiagnosticsRecord&, const SolverState& s) {
    account(slope_budget(s.u, s.t, st.solver.profile));
  };
  hooks.on_particle_state = [&](const DiagnosticsRecord&, const ParticleState& s) {
    account(slope_budget(s, st.solver.profile));
  };
  st.outcome = run(st.solver, hooks);

  const auto& recs = st.outcome.records;
  st.E0 = recs.front().E;
  st.energy_residual = energy_law_residual(recs, st.solver.profile);
  st.amplitude_bound = std::numbers::sqrt2 / 2.0 * std::sqrt(st.E0);
  for (const auto& r : recs) st.max_sup_abs_u = std::max(st.max_sup_abs_u, r.sup_abs_u);
  st.dissipative = st.solver.profile.dissipative_on(st.solver.t_end);
  st.rate = estimate_blowup(recs);
  for (const auto& tr : st.outcome.tracks) st.tracks.push_back(summarize_track(tr));
  if (st.outcome.kind == OutcomeKind::breaking_detected && st.criteria.location_interval) {
    const double x = recs.back().x_argmin;
    st.location_inside = x >= st.criteria.location_interval->first && x <= st.criteria.location_interval->second;
  }
  st.comparison = compare_with_omega(recs, delta, K);
  st.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return st;
}

}  // namespace chbreak::cli
