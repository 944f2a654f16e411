#pragma once

#include <optional>
#include <string_view>

#include "chbreak/criteria.hpp"
#include "chbreak/grid.hpp"
#include "chbreak/model.hpp"

namespace chbreak {

enum class BreakingCriterion { slope_only, mixed };

std::string_view to_string(BreakingCriterion c);
std::optional<BreakingCriterion> parse_criterion(std::string_view name);

/// Required relative margin of a returned datum.
inline constexpr double kSearchMargin = 0.1;

struct BreakingDatum {
  InitialDatum datum;
  CriterionReport report;
  /// margin1 for slope_only, margin2 for mixed.
  double margin = 0.0;
};

/**
 * Width search at fixed amplitude for a datum satisfying the requested
 * criterion with margin >= kSearchMargin.
 *
 * sigma is scanned geometrically from L/8 down to 4 dx; widths whose datum
 * fails the edge-decay check are skipped. Once a passing width is found the
 * bracket with the preceding failing width is bisected, and the passing end
 * of the final bracket is returned. nullopt means infeasible on this grid.
 */
std::optional<BreakingDatum> find_breaking_datum(InitialDatum::Family family, double amplitude, double delta,
                                                 BreakingCriterion criterion, const GridPtr& grid,
                                                 double center = 0.0);

}  // namespace chbreak
