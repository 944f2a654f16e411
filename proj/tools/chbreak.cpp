#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "chbreak/cli/commands.hpp"
#include "chbreak/cli/output.hpp"

int main(int argc, char** argv) {
  namespace cli = chbreak::cli;
  CLI::App app{"Wave-breaking laboratory for a Camassa-Holm-type equation with time-varying dissipation"};
  app.require_subcommand(1);

  std::string sim_config, sim_out;
  auto* sim = app.add_subcommand("simulate", "Run one configuration; write records CSV, summary JSON, plots");
  sim->add_option("config", sim_config, "Run configuration (INI)")->required();
  sim->add_option("-o,--output-dir", sim_out, "Directory for relative output paths");

  std::string crit_config;
  auto* crit = app.add_subcommand("criteria", "Evaluate both blow-up criteria without running the PDE");
  crit->add_option("config", crit_config, "Run configuration (INI)")->required();

  cli::RiccatiArgs ric_args;
  auto* ric = app.add_subcommand("riccati", "Tabulate comparison-ODE blow-up times against closed-form bounds");
  ric->add_option("--delta", ric_args.delta, "Dissipation bounds")->delimiter(',');
  ric->add_option("--K", ric_args.K, "Forcing constants")->delimiter(',');
  ric->add_option("--omega0", ric_args.omega0, "Initial values of omega")->delimiter(',');
  ric->add_flag("--coupled", ric_args.coupled, "Solve the coupled (Phi, Psi) system instead");
  ric->add_option("--phi0", ric_args.phi0, "Initial Phi values (coupled)")->delimiter(',');
  ric->add_option("--psi0", ric_args.psi0, "Initial Psi values (coupled)")->delimiter(',');
  ric->add_option("--t-max", ric_args.t_max, "Integration horizon");

  std::string sweep_config, sweep_out;
  std::optional<unsigned> workers;
  auto* sweep = app.add_subcommand("sweep", "Run the [sweep] grid of a configuration concurrently");
  sweep->add_option("config", sweep_config, "Run configuration with a [sweep] section")->required();
  sweep->add_option("-o,--output-dir", sweep_out, "Directory for relative output paths");
  sweep->add_option("-w,--workers", workers, "Concurrent cells (default: CHBREAK_WORKERS or logical cores)");

  auto* version = app.add_subcommand("version", "Print the artifact version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }

  if (*sim) return cli::cmd_simulate(sim_config, sim_out, std::cout, std::cerr);
  if (*crit) return cli::cmd_criteria(crit_config, std::cout, std::cerr);
  if (*ric) return cli::cmd_riccati(ric_args, std::cout, std::cerr);
  if (*sweep) return cli::cmd_sweep(sweep_config, sweep_out, cli::resolve_workers(workers), std::cout, std::cerr);
  if (*version) {
    std::cout << "chbreak " << cli::kVersion << '\n';
    return 0;
  }
  return cli::kExitConfig;
}
