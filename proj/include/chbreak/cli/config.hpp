#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chbreak/datum_search.hpp"
#include "chbreak/model.hpp"
#include "chbreak/solver.hpp"

namespace chbreak::cli {

/// Invalid configuration; what() is "source:line: message".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, std::size_t line, const std::string& message);
  explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

struct GridSpec {
  double L = 30.0;
  std::size_t N = 1024;
  bool operator==(const GridSpec&) const = default;
};

struct DatumSpec {
  InitialDatum::Family family = InitialDatum::Family::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  std::vector<double> samples;
  /// When set, width is chosen by find_breaking_datum with delta = delta_sup.
  std::optional<BreakingCriterion> search;
  bool operator==(const DatumSpec&) const = default;

  InitialDatum build() const;
};

struct DissipationSpec {
  DissipationProfile::Kind kind = DissipationProfile::Kind::constant;
  double value = 0.0;
  double lambda0 = 0.0;
  double slope = 0.0;
  double mean = 0.0;
  double amplitude = 0.0;
  double omega = 1.0;
  double phase = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  std::optional<double> delta_sup;
  bool operator==(const DissipationSpec&) const = default;

  DissipationProfile build() const;
};

struct SolverSpec {
  Scheme scheme = Scheme::spectral;
  double t_end = 1.0;
  double cfl_factor = 0.3;
  double c_m = 0.2;
  double dt_min = 1e-12;
  double m_stop = -1e6;
  std::size_t record_stride = 1;
  double resolution_tol = 1e-10;
  bool operator==(const SolverSpec&) const = default;
};

struct OutputSpec {
  std::string records = "records.csv";
  std::string summary = "summary.json";
  bool plots = false;
  std::string plot_dir = "plots";
  /// Adds wall time to the summary (which then differs between reruns).
  bool timing = false;
  bool operator==(const OutputSpec&) const = default;
};

struct CharacteristicsSpec {
  std::vector<double> seeds;
  /// Adds the criterion point x1 as a seed.
  bool track_x1 = false;
  /// Overrides the default x1 (grid argmin of u0' + |u0|).
  std::optional<double> x1;
  bool operator==(const CharacteristicsSpec&) const = default;
};

enum class SweepParam { width, amplitude };

struct SweepSpec {
  SweepParam param = SweepParam::width;
  std::vector<double> values;
  /// Each delta runs with constant dissipation lambda = delta.
  std::vector<double> deltas;
  std::string output = "sweep.csv";
  bool operator==(const SweepSpec&) const = default;
};

struct RunConfig {
  GridSpec grid;
  DatumSpec datum;
  DissipationSpec dissipation;
  SolverSpec solver;
  OutputSpec outputs;
  CharacteristicsSpec characteristics;
  std::optional<SweepSpec> sweep;
  bool operator==(const RunConfig&) const = default;

  /// Solver configuration with the given datum (seeds not included).
  SolverConfig solver_config(const InitialDatum& datum) const;
};

/// Parses INI-style text: [section] headers, key = value lines, full-line '#' or ';'
/// comments. Lists are comma separated. Throws ConfigError.
RunConfig parse_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text with every key spelled out; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& cfg);

/// Shortest round-trip decimal form.
std::string format_double(double v);

std::string_view to_string(SweepParam p);

}  // namespace chbreak::cli
