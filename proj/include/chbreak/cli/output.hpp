#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chbreak/cli/study.hpp"
#include "chbreak/criteria.hpp"
#include "chbreak/diagnostics.hpp"

namespace chbreak::cli {

inline constexpr std::string_view kVersion = "1.0.0";
/// Bumped whenever a CSV column or a summary key changes meaning.
inline constexpr int kOutputSchemaVersion = 1;

using Json = nlohmann::ordered_json;

Json criteria_json(const CriterionReport& r);
Json rate_json(const std::optional<RateEstimate>& r);
Json datum_json(const InitialDatum& d);

/// Run summary. wall_time_s is present only when outputs.timing is set.
Json summary_json(const RunConfig& cfg, const StudyResult& st);

/// Header t,E,m,x_argmin,sup_abs_u,dt,lambda_int and one row per record.
std::string records_csv(std::span<const DiagnosticsRecord> records);

/// Static SVG line chart.
std::string svg_line_chart(std::string_view title, std::string_view x_label, std::string_view y_label,
                           std::span<const double> x, std::span<const double> y);

}  // namespace chbreak::cli
