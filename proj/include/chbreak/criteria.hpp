#pragma once

#include <optional>
#include <utility>

#include "chbreak/grid.hpp"
#include "chbreak/model.hpp"
#include "chbreak/particles.hpp"

namespace chbreak {

/// Blow-up criteria for a datum and a dissipation bound delta.
///
/// With s = sqrt(delta^2 + 2K):
///   criterion 1: min u0' < -delta - s,
///   criterion 2: u0'(x1) < -|u0(x1)| - delta - s.
/// T1_bound uses omega(0) = m(0) = min u0'.
struct CriterionReport {
  double E0 = 0.0;
  double K = 0.0;
  double delta = 0.0;
  double s = 0.0;
  /// -delta - s
  double threshold_slope = 0.0;

  double min_slope = 0.0;
  double x0 = 0.0;
  /// True when min_slope came from the family's closed form.
  bool slope_analytic = false;
  bool criterion1_satisfied = false;
  /// (threshold_slope - min_slope) / |threshold_slope|; positive when satisfied.
  double margin1 = 0.0;
  std::optional<double> T1_bound;

  std::optional<double> x1;
  double u0_x1 = 0.0;
  double u0x_x1 = 0.0;
  double mixed_threshold = 0.0;
  bool criterion2_satisfied = false;
  double margin2 = 0.0;
  std::optional<double> g0;
  std::optional<double> T2_bound;
  std::optional<std::pair<double, double>> location_interval;
};

/// K = (sqrt 2 / 2) E0^{3/2} + (5/2) E0, with E0 = ||u0||_1^2.
double compute_K(double E0);
double compute_K(const Field& u0);

/// Time after which omega' = -delta omega - omega^2/2 + K, omega(0) = omega0
/// has blown down; nullopt unless omega0 < -delta - sqrt(delta^2 + 2K).
std::optional<double> time_bound_slope(double delta, double K, double omega0);
/// (1/s) log((g0 - delta + s) / (g0 - delta - s)); nullopt unless g0 > delta + s.
std::optional<double> time_bound_mixed(double delta, double K, double g0);

/// Fills the criterion-1 fields. `analytic` overrides the grid minimum of u0'.
/// Grid ties resolve to the smallest x.
CriterionReport check_criterion1(const Field& u0, double delta, std::optional<SlopePoint> analytic = std::nullopt);

/// Fills both criteria, criterion 2 at x1 via trigonometric interpolation.
/// Throws NumericalError if the mixed condition holds while u0x^2 <= u0^2.
CriterionReport check_criterion2(const Field& u0, double delta, double x1,
                                 std::optional<SlopePoint> analytic = std::nullopt);

/// Grid node minimizing u0' + |u0| (smallest x on ties).
double default_x1(const Field& u0);

/// Both criteria for a datum on a grid; x1 defaults to default_x1.
CriterionReport evaluate_criteria(const InitialDatum& datum, const GridPtr& grid, double delta,
                                  std::optional<double> x1 = std::nullopt);

/// Terms of the slope equation at the steepest point xi(t):
///   m' = -m^2/2 - lambda m + forcing,
///   forcing = u^2 - P*(u^2 + u_x^2/2) - P*h(u) + h(u),
///   H = forcing + lambda^2/2.
struct SlopeBudget {
  double xi = 0.0;
  double m = 0.0;
  double u = 0.0;
  double lambda = 0.0;
  double forcing = 0.0;
  double m_prime = 0.0;
  double H = 0.0;
};

/// Steepest point of a grid field, refined off-grid by Newton's method on the
/// interpolant of u_xx.
double refined_argmin_slope(const Field& u);

SlopeBudget slope_budget(const Field& u, double t, const DissipationProfile& profile);
SlopeBudget slope_budget(const ParticleState& s, const DissipationProfile& profile);

double m_prime_rhs(const Field& u, double t, const DissipationProfile& profile);
double m_prime_rhs(const ParticleState& s, const DissipationProfile& profile);

}  // namespace chbreak
