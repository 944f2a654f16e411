#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chbreak/diagnostics.hpp"

namespace chbreak {

struct RiccatiOptions {
  /// dt = step_factor / max(1, |state|)
  double step_factor = 1e-3;
  /// Blow-up is declared once |state| reaches this.
  double blowup_value = 1e8;
  /// Reciprocal-fit window: |state| above this enters the fit.
  double fit_window = 1e4;
  /// Times at which the trajectory is sampled exactly (ascending).
  std::vector<double> sample_times;
};

struct TimedValue {
  double t;
  double value;
};

/// omega' = -delta omega - omega^2/2 + K.
struct ScalarComparison {
  double delta = 0.0;
  double K = 0.0;
  double omega0 = 0.0;
  std::vector<double> t;
  std::vector<double> omega;
  /// Values at RiccatiOptions::sample_times reached before blow-up.
  std::vector<TimedValue> samples;
  bool blew_up = false;
  double t_reached = 0.0;
  /// Reciprocal-fit estimate of the blow-up time.
  std::optional<RateEstimate> fit;
  std::optional<double> T_bound;

  std::optional<double> T_numeric() const {
    return fit ? std::optional<double>(fit->T_star) : std::nullopt;
  }
};

ScalarComparison solve_omega(double delta, double K, double omega0, double t_max, const RiccatiOptions& opt = {});

/// Closed-form blow-up time of the omega equation; nullopt unless
/// omega0 < -delta - sqrt(delta^2 + 2K).
std::optional<double> omega_bound(double delta, double K, double omega0);

/// For f' >= a f^2 - b with a, b > 0 and f0 > sqrt(b/a):
///   T* <= 1/(2 sqrt(ab)) log((f0 + sqrt(b/a)) / (f0 - sqrt(b/a))).
/// Throws PreconditionError otherwise.
double chen_bound(double a, double b, double f0);

/// Phi' = -Phi (Psi + 2 delta)/2 - K, Psi' = Psi (Phi + 2 delta)/2 + K,
/// g = sqrt(-Phi Psi).
struct CoupledComparison {
  double delta = 0.0;
  double K = 0.0;
  double phi0 = 0.0;
  double psi0 = 0.0;
  std::vector<double> t;
  std::vector<double> phi;
  std::vector<double> psi;
  /// NaN where Phi Psi >= 0.
  std::vector<double> g;
  bool blew_up = false;
  double t_reached = 0.0;
  /// Reciprocal fit on -g.
  std::optional<RateEstimate> fit;
  /// chen_bound(1/2, delta^2/2 + K, g0 - delta) when it applies.
  std::optional<double> T_bound;
  /// Phi0 > delta + s and Psi0 < -(delta + s) with s = sqrt(delta^2 + 2K).
  bool sign_conditions = false;
  /// Worst (g' - (g^2/2 - delta g - K)) over samples with Phi > 0 > Psi.
  double g_inequality_margin = 0.0;
  bool phi_increasing = true;
  bool psi_decreasing = true;

  std::optional<double> T_numeric() const {
    return fit ? std::optional<double>(fit->T_star) : std::nullopt;
  }
};

CoupledComparison solve_coupled(double delta, double K, double phi0, double psi0, double t_max,
                                const RiccatiOptions& opt = {});

}  // namespace chbreak
