#include "chbreak/datum_search.hpp"

#include <cmath>

namespace chbreak {

namespace {

constexpr int kScanSteps = 64;
constexpr int kBisections = 40;

InitialDatum make_family(InitialDatum::Family family, double a, double sigma, double c) {
  switch (family) {
    case InitialDatum::Family::gaussian_derivative: return InitialDatum::gaussian_derivative(a, sigma, c);
    case InitialDatum::Family::antisym_peak: return InitialDatum::antisym_peak(a, sigma, c);
    default: throw PreconditionError("find_breaking_datum: family must be gaussian_derivative or antisym_peak");
  }
}

std::optional<BreakingDatum> evaluate(InitialDatum::Family family, double a, double sigma, double c, double delta,
                                      BreakingCriterion criterion, const GridPtr& grid) {
  BreakingDatum out{make_family(family, a, sigma, c), {}, 0.0};
  try {
    out.report = evaluate_criteria(out.datum, grid, delta);
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
  out.margin = criterion == BreakingCriterion::slope_only ? out.report.margin1 : out.report.margin2;
  return out;
}

bool passes(const BreakingDatum& d, BreakingCriterion criterion) {
  const bool ok = criterion == BreakingCriterion::slope_only ? d.report.criterion1_satisfied
                                                             : d.report.criterion2_satisfied;
  return ok && d.margin >= kSearchMargin;
}

}  // namespace

std::string_view to_string(BreakingCriterion c) {
  return c == BreakingCriterion::slope_only ? "slope_only" : "mixed";
}

std::optional<BreakingCriterion> parse_criterion(std::string_view name) {
  if (name == "slope_only") return BreakingCriterion::slope_only;
  if (name == "mixed") return BreakingCriterion::mixed;
  return std::nullopt;
}

std::optional<BreakingDatum> find_breaking_datum(InitialDatum::Family family, double amplitude, double delta,
                                                 BreakingCriterion criterion, const GridPtr& grid, double center) {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw PreconditionError("find_breaking_datum: amplitude must be positive");
  }
  make_family(family, amplitude, 1.0, center);
  const double hi = grid->half_length() / 8.0;
  const double lo = 4.0 * grid->dx();
  if (!(lo < hi)) return std::nullopt;
  const double ratio = std::pow(lo / hi, 1.0 / kScanSteps);

  std::optional<double> failing;
  for (int i = 0; i <= kScanSteps; ++i) {
    const double sigma = i == kScanSteps ? lo : hi * std::pow(ratio, i);
    auto d = evaluate(family, amplitude, sigma, center, delta, criterion, grid);
    if (!d) continue;
    if (!passes(*d, criterion)) {
      failing = sigma;
      continue;
    }
    if (!failing) return d;
    double bad = *failing, good = sigma;
    BreakingDatum best = *d;
    for (int k = 0; k < kBisections; ++k) {
      const double mid = std::sqrt(bad * good);
      auto m = evaluate(family, amplitude, mid, center, delta, criterion, grid);
      if (m && passes(*m, criterion)) {
        good = mid;
        best = *m;
      } else {
        bad = mid;
      }
    }
    return best;
  }
  return std::nullopt;
}

}  // namespace chbreak
