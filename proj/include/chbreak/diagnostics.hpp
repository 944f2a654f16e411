#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "chbreak/model.hpp"

namespace chbreak {

class CharacteristicTrack;

/// Scalars recorded after an accepted step.
struct DiagnosticsRecord {
  double t = 0.0;
  /// int (u^2 + u_x^2) dx
  double E = 0.0;
  /// min_x u_x
  double m = 0.0;
  double x_argmin = 0.0;
  double sup_abs_u = 0.0;
  /// Size of the step that produced this record (0 for the initial record).
  double dt = 0.0;
  /// int_0^t lambda
  double lambda_int = 0.0;
};

/// Slopes below -kRateWindowSlope enter the reciprocal fit.
inline constexpr double kRateWindowSlope = 1e2;
/// Records with m <= -kSmoothRegimeSlope are excluded from the energy-law check.
inline constexpr double kSmoothRegimeSlope = 1e3;
inline constexpr std::size_t kMinFitPoints = 8;

struct RateEstimate {
  double T_star = 0.0;
  /// Limit of m(t) (T* - t); -2 for wave breaking.
  double rate = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  /// Max |(-1/m) - fitted line| over the window.
  double fit_residual = 0.0;
  std::size_t n_points = 0;
};

/// max over records with m > -1e3 of |E(t) - exp(-2 Lambda(t)) E(0)| / E(0),
/// with Lambda from the profile's closed form.
double energy_law_residual(std::span<const DiagnosticsRecord> records, const DissipationProfile& profile);

/// Reciprocal fit on arbitrary samples: least squares of y = -1/m against t
/// over the longest tail in which m < -window_slope. Gives T* = -b/s and
/// rate = 1/s for the line y = b + s t. Returns nullopt when the tail has
/// fewer than kMinFitPoints samples.
std::optional<RateEstimate> fit_reciprocal(std::span<const double> t, std::span<const double> m,
                                           double window_slope = kRateWindowSlope);

std::optional<RateEstimate> estimate_blowup(std::span<const DiagnosticsRecord> records,
                                            double window_slope = kRateWindowSlope);

/// Same estimator on u_x along a characteristic.
std::optional<RateEstimate> track_rate(const CharacteristicTrack& track, double window_slope = kRateWindowSlope);

}  // namespace chbreak
