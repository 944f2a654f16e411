#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chbreak/grid.hpp"

namespace chbreak {

/**
 * Time-dependent damping coefficient lambda(t) together with a certified
 * upper bound delta >= lambda(t) on the run horizon and the closed-form
 * running integral Lambda(t) = int_0^t lambda.
 */
class DissipationProfile {
 public:
  enum class Kind { constant, linear_ramp, sinusoidal, piecewise_table };

  DissipationProfile() : DissipationProfile(constant(0.0)) {}

  static DissipationProfile constant(double value, std::optional<double> delta_sup = std::nullopt);
  /// lambda(t) = lambda0 + slope * t. delta_sup is required (the bound depends on the horizon).
  static DissipationProfile linear_ramp(double lambda0, double slope, double delta_sup);
  /// lambda(t) = mean + amplitude * sin(omega t + phase).
  static DissipationProfile sinusoidal(double mean, double amplitude, double omega, double phase = 0.0,
                                       std::optional<double> delta_sup = std::nullopt);
  /// Piecewise-linear through (times[i], values[i]); constant beyond the ends.
  static DissipationProfile piecewise_table(std::vector<double> times, std::vector<double> values,
                                            std::optional<double> delta_sup = std::nullopt);

  Kind kind() const { return kind_; }
  double lambda(double t) const;
  /// int_0^t lambda(tau) d tau.
  double integral(double t) const;
  double delta_sup() const { return delta_sup_; }

  /// Checks delta_sup against a dense sample of lambda on [0, horizon].
  /// Throws PreconditionError when the bound is violated.
  void validate(double horizon) const;
  /// False when lambda(t) < 0 somewhere on [0, horizon] (energy injection).
  bool dissipative_on(double horizon) const;

  /// Kind-specific parameters in declaration order of the factory.
  const std::vector<double>& parameters() const { return params_; }
  const std::vector<double>& table_times() const { return table_t_; }
  const std::vector<double>& table_values() const { return table_v_; }

 private:
  DissipationProfile(Kind kind, std::vector<double> params, double delta_sup)
      : kind_(kind), params_(std::move(params)), delta_sup_(delta_sup) {}

  Kind kind_;
  std::vector<double> params_;
  std::vector<double> table_t_;
  std::vector<double> table_v_;
  double delta_sup_;
};

std::string_view to_string(DissipationProfile::Kind kind);

/// Location and value of the steepest negative slope of an analytic datum.
struct SlopePoint {
  double x;
  double slope;
};

/// Parametrized initial data u0(x).
struct InitialDatum {
  enum class Family { gaussian, gaussian_derivative, sech_squared, antisym_peak, samples };

  Family family = Family::gaussian;
  double amplitude = 0.0;
  /// sigma for the Gaussian families and antisym_peak, w for sech_squared.
  double width = 1.0;
  double center = 0.0;
  std::vector<double> samples;

  /// a exp(-(x-c)^2 / (2 sigma^2)).
  static InitialDatum gaussian(double a, double sigma, double x_c = 0.0);
  /// -a (x-c) exp(-(x-c)^2 / (2 sigma^2)); slope -a at x_c.
  static InitialDatum gaussian_derivative(double a, double sigma, double x_c = 0.0);
  /// a sech^2((x-c)/w).
  static InitialDatum sech_squared(double a, double w, double x_c = 0.0);
  /// -a sigma tanh(s) sech(s), s = (x-c)/sigma; slope -a at x_c.
  static InitialDatum antisym_peak(double a, double sigma, double x_c = 0.0);
  static InitialDatum from_samples(std::vector<double> values);

  /// Analytic value (not available for samples).
  double value(double x) const;
  /// Analytic derivative (not available for samples).
  double slope(double x) const;
  /// Steepest descending point of the analytic profile, if the family has one.
  std::optional<SlopePoint> designated_slope() const;
};

std::string_view to_string(InitialDatum::Family family);
std::optional<InitialDatum::Family> parse_family(std::string_view name);

/// h(u) = u^3 - 3/2 u^2, pointwise.
Field h_eval(const Field& u);
double h_value(double u);

/// u_t = -u u_x - d/dx P*(u^2 + u_x^2/2 + h(u)) - lambda(t) u.
/// Nonlinear products are dealiased. Throws NumericalError on breakdown.
Field rhs(const Field& u, double t, const DissipationProfile& profile);

/// d/dt u_x = -u_x^2/2 - u u_xx - P*(u^2 + u_x^2/2) + u^2 - P*h(u) + h(u) - lambda(t) u_x.
Field slope_rhs(const Field& u, double t, const DissipationProfile& profile);

/// Samples the datum on the grid. Throws PreconditionError for invalid
/// parameters or when the sampled field does not decay at the edges.
Field make_datum(const InitialDatum& datum, const GridPtr& grid);

}  // namespace chbreak
