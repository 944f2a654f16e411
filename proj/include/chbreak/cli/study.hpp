#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "chbreak/characteristics.hpp"
#include "chbreak/cli/config.hpp"
#include "chbreak/criteria.hpp"
#include "chbreak/diagnostics.hpp"
#include "chbreak/solver.hpp"

namespace chbreak::cli {

struct TrackReport {
  double seed = 0.0;
  std::size_t n_samples = 0;
  std::size_t unreliable_samples = 0;
  bool edge_contaminated = false;
  double q_final = 0.0;
  double ux_final = 0.0;
  std::optional<RateEstimate> rate;
  double diffeo_factor = 1.0;
  /// Phi > 0 > Psi at t = 0, and at every later sample.
  bool sign_condition_initial = false;
  bool sign_condition_kept = false;
  /// Largest relative decrease of g between reliable samples while Phi > 0 > Psi.
  double g_max_decrease = 0.0;
  /// max over samples of g - (-u_x).
  double g_excess = 0.0;
};

/// m(t) against omega' = -delta omega - omega^2/2 + K, omega(0) = m(0).
struct ComparisonReport {
  double delta = 0.0;
  double omega0 = 0.0;
  std::size_t common_samples = 0;
  /// max (m - omega) over common samples.
  double max_excess = 0.0;
  std::optional<double> omega_blowup;
};

/// Slope-equation terms at every record.
struct BudgetReport {
  std::size_t evaluated = 0;
  /// max of m' - (-lambda m - m^2/2 + K)
  double max_m_prime_excess = 0.0;
  double max_abs_H = 0.0;
  /// K + delta^2 / 2
  double H_bound = 0.0;
};

struct StudyResult {
  InitialDatum datum;
  bool searched = false;
  SolverConfig solver;
  CriterionReport criteria;
  RunOutcome outcome;
  double E0 = 0.0;
  double energy_residual = 0.0;
  /// (sqrt 2 / 2) ||u0||_1
  double amplitude_bound = 0.0;
  double max_sup_abs_u = 0.0;
  bool dissipative = true;
  std::optional<RateEstimate> rate;
  std::vector<TrackReport> tracks;
  /// Index into tracks of the x1 track.
  std::optional<std::size_t> x1_track;
  /// Final x_argmin inside the criterion-2 location interval (breaking runs).
  std::optional<bool> location_inside;
  ComparisonReport comparison;
  BudgetReport budget;
  double wall_time_s = 0.0;
};

/// Resolves the datum (running the width search if requested), evaluates the
/// criteria, runs the solver and post-processes the records and tracks.
/// Throws PreconditionError for unusable configurations.
StudyResult run_study(const RunConfig& cfg);

/// Datum named by the config, after the optional width search.
InitialDatum resolve_datum(const RunConfig& cfg, bool* searched = nullptr);

}  // namespace chbreak::cli
