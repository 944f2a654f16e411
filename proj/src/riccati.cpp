#include "chbreak/riccati.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "chbreak/errors.hpp"

namespace chbreak {

namespace {

template <std::size_t D>
using Vec = std::array<double, D>;

template <std::size_t D>
Vec<D> axpy(const Vec<D>& y, const Vec<D>& k, double h) {
  Vec<D> o;
  for (std::size_t i = 0; i < D; ++i) o[i] = y[i] + h * k[i];
  return o;
}

template <std::size_t D>
double norm_inf(const Vec<D>& y) {
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v));
  return m;
}

template <std::size_t D>
struct Trajectory {
  std::vector<double> t;
  std::vector<Vec<D>> y;
  std::vector<std::pair<double, Vec<D>>> samples;
  bool blew_up = false;
};

// RK4 with dt = c / max(1, |y|), landing exactly on the requested sample times.
template <std::size_t D, typename F>
Trajectory<D> integrate(F f, Vec<D> y, double t_max, const RiccatiOptions& opt) {
  if (!(opt.step_factor > 0.0) || !(opt.blowup_value > 0.0)) {
    throw PreconditionError("Riccati options must be positive");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw PreconditionError("Riccati initial value must be finite");
  }
  Trajectory<D> tr;
  double t = 0.0;
  std::size_t next_sample = 0;
  auto take_samples = [&] {
    while (next_sample < opt.sample_times.size() && opt.sample_times[next_sample] <= t) {
      if (opt.sample_times[next_sample] == t) tr.samples.emplace_back(t, y);
      ++next_sample;
    }
  };
  tr.t.push_back(t);
  tr.y.push_back(y);
  take_samples();
  while (t < t_max) {
    if (norm_inf(y) >= opt.blowup_value) {
      tr.blew_up = true;
      break;
    }
    double dt = std::min(opt.step_factor / std::max(1.0, norm_inf(y)), t_max - t);
    bool lands = false;
    if (next_sample < opt.sample_times.size() && opt.sample_times[next_sample] - t <= dt) {
      dt = opt.sample_times[next_sample] - t;
      lands = true;
    }
    const Vec<D> k1 = f(y);
    const Vec<D> k2 = f(axpy(y, k1, 0.5 * dt));
    const Vec<D> k3 = f(axpy(y, k2, 0.5 * dt));
    const Vec<D> k4 = f(axpy(y, k3, dt));
    for (std::size_t i = 0; i < D; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t = lands ? opt.sample_times[next_sample] : (dt >= t_max - t ? t_max : t + dt);
    if (!std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); })) {
      throw NumericalError("Riccati integration produced a non-finite state");
    }
    tr.t.push_back(t);
    tr.y.push_back(y);
    take_samples();
  }
  if (norm_inf(y) >= opt.blowup_value) tr.blew_up = true;
  return tr;
}

double closed_form_mixed(double delta, double K, double g0) {
  const double disc = delta * delta + 2.0 * K;
  const double s = std::sqrt(disc);
  const double b = g0 - delta;
  if (s == 0.0) return 2.0 / b;
  return std::log1p(2.0 * s / (b - s)) / s;
}

}  // namespace

std::optional<double> omega_bound(double delta, double K, double omega0) {
  const double disc = delta * delta + 2.0 * K;
  if (!(disc >= 0.0)) throw PreconditionError("omega_bound: delta^2 + 2K < 0");
  const double s = std::sqrt(disc);
  const double a = omega0 + delta;
  if (!(a < -s)) return std::nullopt;
  if (s == 0.0) return -2.0 / a;
  return std::log1p(-2.0 * s / (a + s)) / s;
}

double chen_bound(double a, double b, double f0) {
  if (!(a > 0.0)) throw PreconditionError("chen_bound: a must be positive");
  if (!(b > 0.0)) throw PreconditionError("chen_bound: b must be positive");
  const double r = std::sqrt(b / a);
  if (!(f0 > r)) throw PreconditionError("chen_bound: f0 must exceed sqrt(b/a)");
  return 1.0 / (2.0 * std::sqrt(a * b)) * std::log1p(2.0 * r / (f0 - r));
}

ScalarComparison solve_omega(double delta, double K, double omega0, double t_max, const RiccatiOptions& opt) {
  if (!std::isfinite(delta) || !std::isfinite(K) || !std::isfinite(t_max) || t_max < 0.0) {
    throw PreconditionError("solve_omega: parameters must be finite and t_max >= 0");
  }
  auto f = [delta, K](const Vec<1>& w) { return Vec<1>{-delta * w[0] - 0.5 * w[0] * w[0] + K}; };
  const auto tr = integrate<1>(f, Vec<1>{omega0}, t_max, opt);

  ScalarComparison out;
  out.delta = delta;
  out.K = K;
  out.omega0 = omega0;
  out.t = tr.t;
  out.omega.reserve(tr.y.size());
  for (const auto& y : tr.y) out.omega.push_back(y[0]);
  for (const auto& [t, y] : tr.samples) out.samples.push_back({t, y[0]});
  out.blew_up = tr.blew_up && out.omega.back() < 0.0;
  out.t_reached = tr.t.back();
  if (out.blew_up) out.fit = fit_reciprocal(out.t, out.omega, opt.fit_window);
  out.T_bound = omega_bound(delta, K, omega0);
  return out;
}

CoupledComparison solve_coupled(double delta, double K, double phi0, double psi0, double t_max,
                                const RiccatiOptions& opt) {
  if (!std::isfinite(delta) || !std::isfinite(K) || !std::isfinite(t_max) || t_max < 0.0) {
    throw PreconditionError("solve_coupled: parameters must be finite and t_max >= 0");
  }
  auto f = [delta, K](const Vec<2>& y) {
    return Vec<2>{-0.5 * y[0] * (y[1] + 2.0 * delta) - K, 0.5 * y[1] * (y[0] + 2.0 * delta) + K};
  };
  const auto tr = integrate<2>(f, Vec<2>{phi0, psi0}, t_max, opt);

  CoupledComparison out;
  out.delta = delta;
  out.K = K;
  out.phi0 = phi0;
  out.psi0 = psi0;
  out.t = tr.t;
  const double s = std::sqrt(std::max(0.0, delta * delta + 2.0 * K));
  out.sign_conditions = phi0 > delta + s && psi0 < -(delta + s);

  out.g_inequality_margin = std::numeric_limits<double>::infinity();
  std::vector<double> neg_g;
  for (std::size_t i = 0; i < tr.y.size(); ++i) {
    const double ph = tr.y[i][0], ps = tr.y[i][1];
    out.phi.push_back(ph);
    out.psi.push_back(ps);
    const double prod = -ph * ps;
    const double g = prod > 0.0 ? std::sqrt(prod) : std::numeric_limits<double>::quiet_NaN();
    out.g.push_back(g);
    neg_g.push_back(std::isnan(g) ? 0.0 : -g);
    if (i > 0) {
      if (!(ph > out.phi[i - 1])) out.phi_increasing = false;
      if (!(ps < out.psi[i - 1])) out.psi_decreasing = false;
    }
    if (ph > 0.0 && ps < 0.0) {
      const auto d = f(tr.y[i]);
      const double g_prime = -(d[0] * ps + ph * d[1]) / (2.0 * g);
      const double excess = (g_prime - (0.5 * g * g - delta * g - K)) / std::max(1.0, g * g);
      out.g_inequality_margin = std::min(out.g_inequality_margin, excess);
    }
  }
  if (!std::isfinite(out.g_inequality_margin)) out.g_inequality_margin = 0.0;
  out.blew_up = tr.blew_up;
  out.t_reached = tr.t.back();
  if (out.blew_up) out.fit = fit_reciprocal(out.t, neg_g, opt.fit_window);
  if (phi0 * psi0 < 0.0) {
    const double g0 = std::sqrt(-phi0 * psi0);
    if (g0 - delta > s) out.T_bound = closed_form_mixed(delta, K, g0);
  }
  return out;
}

}  // namespace chbreak
