#include "chbreak/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chbreak {

namespace {

double margin(double threshold, double value) {
  return (threshold - value) / std::max(std::abs(threshold), 1e-300);
}

std::size_t first_min_index(std::span<const double> v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

double compute_K(double E0) {
  if (!(E0 >= 0.0)) throw PreconditionError("compute_K: E0 must be non-negative");
  return std::numbers::sqrt2 / 2.0 * std::pow(E0, 1.5) + 2.5 * E0;
}

double compute_K(const Field& u0) { return compute_K(h1_norm_sq(u0)); }

std::optional<double> time_bound_slope(double delta, double K, double omega0) {
  const double disc = delta * delta + 2.0 * K;
  if (disc < 0.0) throw PreconditionError("time_bound_slope: delta^2 + 2K < 0");
  const double s = std::sqrt(disc);
  const double a = omega0 + delta;
  if (!(a < -s)) return std::nullopt;
  if (s == 0.0) return -2.0 / a;
  // log((a - s) / (a + s)) with a + s < 0.
  return std::log1p(-2.0 * s / (a + s)) / s;
}

std::optional<double> time_bound_mixed(double delta, double K, double g0) {
  const double disc = delta * delta + 2.0 * K;
  if (disc < 0.0) throw PreconditionError("time_bound_mixed: delta^2 + 2K < 0");
  const double s = std::sqrt(disc);
  const double b = g0 - delta;
  if (!(b > s)) return std::nullopt;
  if (s == 0.0) return 2.0 / b;
  return std::log1p(2.0 * s / (b - s)) / s;
}

CriterionReport check_criterion1(const Field& u0, double delta, std::optional<SlopePoint> analytic) {
  require_finite(u0, "check_criterion1");
  if (!std::isfinite(delta)) throw PreconditionError("check_criterion1: delta must be finite");
  CriterionReport r;
  r.E0 = h1_norm_sq(u0);
  r.K = compute_K(r.E0);
  r.delta = delta;
  const double disc = delta * delta + 2.0 * r.K;
  r.s = std::sqrt(disc);
  r.threshold_slope = -delta - r.s;

  if (analytic) {
    r.min_slope = analytic->slope;
    r.x0 = analytic->x;
    r.slope_analytic = true;
  } else {
    const Field ux = deriv(u0);
    const std::size_t j = first_min_index(ux.values());
    r.min_slope = ux[j];
    r.x0 = u0.grid().x(j);
  }
  r.criterion1_satisfied = r.min_slope < r.threshold_slope;
  r.margin1 = margin(r.threshold_slope, r.min_slope);
  if (r.criterion1_satisfied) r.T1_bound = time_bound_slope(delta, r.K, r.min_slope);
  return r;
}

CriterionReport check_criterion2(const Field& u0, double delta, double x1, std::optional<SlopePoint> analytic) {
  CriterionReport r = check_criterion1(u0, delta, analytic);
  r.x1 = x1;
  r.u0_x1 = interp(u0, x1);
  r.u0x_x1 = interp(deriv(u0), x1);
  r.mixed_threshold = -std::abs(r.u0_x1) + r.threshold_slope;
  r.criterion2_satisfied = r.u0x_x1 < r.mixed_threshold;
  r.margin2 = margin(r.mixed_threshold, r.u0x_x1);

  const double g_sq = r.u0x_x1 * r.u0x_x1 - r.u0_x1 * r.u0_x1;
  if (g_sq > 0.0) r.g0 = std::sqrt(g_sq);
  if (r.criterion2_satisfied) {
    if (!r.g0) throw NumericalError("check_criterion2: mixed condition holds but u0x^2 <= u0^2 at x1");
    r.T2_bound = time_bound_mixed(delta, r.K, *r.g0);
    if (!r.T2_bound) throw NumericalError("check_criterion2: mixed condition holds but g0 <= delta + s");
    const double half = std::numbers::sqrt2 / 2.0 * std::sqrt(r.E0) * *r.T2_bound;
    r.location_interval = std::make_pair(x1 - half, x1 + half);
  }
  return r;
}

double default_x1(const Field& u0) {
  const Field ux = deriv(u0);
  std::vector<double> w(u0.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = ux[j] + std::abs(u0[j]);
  return u0.grid().x(first_min_index(w));
}

CriterionReport evaluate_criteria(const InitialDatum& datum, const GridPtr& grid, double delta,
                                  std::optional<double> x1) {
  const Field u0 = make_datum(datum, grid);
  const std::optional<SlopePoint> analytic =
      datum.family == InitialDatum::Family::samples ? std::nullopt : datum.designated_slope();
  return check_criterion2(u0, delta, x1.value_or(default_x1(u0)), analytic);
}

double refined_argmin_slope(const Field& u) {
  const Grid& g = u.grid();
  const Field ux = deriv(u);
  const std::size_t j = first_min_index(ux.values());
  const double node = g.x(j);
  const Field uxx = deriv(ux);
  const TrigInterpolant f(uxx), fp(deriv(uxx));
  double x = node;
  for (int it = 0; it < 30; ++it) {
    const double d = fp(x);
    if (!(d > 0.0)) return node;
    const double dx = f(x) / d;
    x -= dx;
    if (std::abs(x - node) > g.dx()) return node;
    if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return interp(ux, x) <= ux[j] ? x : node;
}

SlopeBudget slope_budget(const Field& u, double t, const DissipationProfile& profile) {
  require_finite(u, "slope_budget");
  const Field ux = deriv(u);
  const Field p_quad = helmholtz_inverse(u * u + 0.5 * (ux * ux));
  const Field h = h_eval(u);
  const Field p_h = helmholtz_inverse(h);

  SlopeBudget b;
  b.xi = refined_argmin_slope(u);
  b.m = interp(ux, b.xi);
  b.u = interp(u, b.xi);
  b.lambda = profile.lambda(t);
  b.forcing = b.u * b.u - interp(p_quad, b.xi) - interp(p_h, b.xi) + h_value(b.u);
  b.m_prime = -0.5 * b.m * b.m - b.lambda * b.m + b.forcing;
  b.H = b.forcing + 0.5 * b.lambda * b.lambda;
  return b;
}

SlopeBudget slope_budget(const ParticleState& s, const DissipationProfile& profile) {
  const std::size_t n = s.size();
  std::vector<double> density(n);
  for (std::size_t j = 0; j < n; ++j) density[j] = s.u[j] * s.u[j] + 0.5 * s.ux[j] * s.ux[j] + h_value(s.u[j]);
  const auto conv = particle_convolutions(s, density);
  const std::size_t k = particle_argmin_slope(s);

  SlopeBudget b;
  b.xi = s.q[k];
  b.m = s.ux[k];
  b.u = s.u[k];
  b.lambda = profile.lambda(s.t);
  b.forcing = b.u * b.u + h_value(b.u) - (conv.plus[k] + conv.minus[k]);
  b.m_prime = -0.5 * b.m * b.m - b.lambda * b.m + b.forcing;
  b.H = b.forcing + 0.5 * b.lambda * b.lambda;
  return b;
}

double m_prime_rhs(const Field& u, double t, const DissipationProfile& profile) {
  return slope_budget(u, t, profile).m_prime;
}

double m_prime_rhs(const ParticleState& s, const DissipationProfile& profile) {
  return slope_budget(s, profile).m_prime;
}

}  // namespace chbreak
