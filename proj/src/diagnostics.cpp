#include "chbreak/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "chbreak/characteristics.hpp"

namespace chbreak {

double energy_law_residual(std::span<const DiagnosticsRecord> records, const DissipationProfile& profile) {
  if (records.empty()) throw PreconditionError("energy_law_residual needs at least one record");
  const double e0 = records.front().E;
  double worst = 0.0;
  for (const auto& r : records) {
    if (r.m <= -kSmoothRegimeSlope) continue;
    const double predicted = std::exp(-2.0 * profile.integral(r.t)) * e0;
    const double diff = std::abs(r.E - predicted);
    worst = std::max(worst, e0 > 0.0 ? diff / e0 : diff);
  }
  return worst;
}

std::optional<RateEstimate> fit_reciprocal(std::span<const double> t, std::span<const double> m,
                                           double window_slope) {
  if (t.size() != m.size()) throw PreconditionError("fit_reciprocal: size mismatch");
  std::size_t first = t.size();
  while (first > 0 && m[first - 1] < -window_slope) --first;
  const std::size_t n = t.size() - first;
  if (n < kMinFitPoints) return std::nullopt;

  // Centering keeps the normal equations well conditioned near T*.
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = first; i < t.size(); ++i) {
    t_mean += t[i];
    y_mean += -1.0 / m[i];
  }
  t_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = first; i < t.size(); ++i) {
    const double dt = t[i] - t_mean;
    stt += dt * dt;
    sty += dt * (-1.0 / m[i] - y_mean);
  }
  if (stt <= 0.0) return std::nullopt;
  const double slope = sty / stt;
  if (slope == 0.0) return std::nullopt;

  RateEstimate est;
  est.T_star = t_mean - y_mean / slope;
  est.rate = 1.0 / slope;
  est.window_start = t[first];
  est.window_end = t.back();
  est.n_points = n;
  for (std::size_t i = first; i < t.size(); ++i) {
    const double fitted = y_mean + slope * (t[i] - t_mean);
    est.fit_residual = std::max(est.fit_residual, std::abs(-1.0 / m[i] - fitted));
  }
  return est;
}

std::optional<RateEstimate> estimate_blowup(std::span<const DiagnosticsRecord> records, double window_slope) {
  std::vector<double> t, m;
  t.reserve(records.size());
  m.reserve(records.size());
  for (const auto& r : records) {
    t.push_back(r.t);
    m.push_back(r.m);
  }
  return fit_reciprocal(t, m, window_slope);
}

std::optional<RateEstimate> track_rate(const CharacteristicTrack& track, double window_slope) {
  std::vector<double> t, ux;
  for (const auto& s : track.samples()) {
    t.push_back(s.t);
    ux.push_back(s.ux);
  }
  return fit_reciprocal(t, ux, window_slope);
}

}  // namespace chbreak
