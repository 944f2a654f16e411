#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "chbreak/cli/config.hpp"

namespace chbreak::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one config; writes records CSV, summary JSON and optional SVG plots
/// under out_dir (relative output paths only).
int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out_dir, std::ostream& out,
                 std::ostream& err);

/// Prints the criterion report of the configured datum as JSON.
int cmd_criteria(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

struct RiccatiArgs {
  std::vector<double> delta{0.0};
  std::vector<double> K{0.0};
  std::vector<double> omega0{-1.0};
  bool coupled = false;
  std::vector<double> phi0{1.0};
  std::vector<double> psi0{-1.0};
  double t_max = 100.0;
};

/// CSV table over the Cartesian product of the parameter lists.
int cmd_riccati(const RiccatiArgs& args, std::ostream& out, std::ostream& err);

/// Sweep CSV rows (header first) for the [sweep] section of a config.
std::vector<std::string> sweep_rows(const RunConfig& cfg, unsigned workers);

int cmd_sweep(const std::filesystem::path& config, const std::filesystem::path& out_dir, unsigned workers,
              std::ostream& out, std::ostream& err);

/// --workers flag, else CHBREAK_WORKERS, else hardware concurrency (at least 1).
unsigned resolve_workers(std::optional<unsigned> flag);

}  // namespace chbreak::cli
