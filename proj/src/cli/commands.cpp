#include "chbreak/cli/commands.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "chbreak/cli/output.hpp"
#include "chbreak/cli/study.hpp"
#include "chbreak/riccati.hpp"

namespace chbreak::cli {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& out_dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || out_dir.empty() ? path : out_dir / path;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : "none"; }

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

int exit_for(OutcomeKind k) {
  return k == OutcomeKind::reached_horizon || k == OutcomeKind::breaking_detected ? kExitOk : kExitNumerical;
}

// Maps library exceptions to exit codes; anything else propagates.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PreconditionError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace

int cmd_simulate(const fs::path& config, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_config(config);
    const StudyResult st = run_study(cfg);
    write_file(resolve(out_dir, cfg.outputs.records), records_csv(st.outcome.records));
    write_file(resolve(out_dir, cfg.outputs.summary), summary_json(cfg, st).dump(2) + "\n");
    if (cfg.outputs.plots) {
      const auto& rs = st.outcome.records;
      std::vector<double> t, e, m, inv;
      for (const auto& r : rs) {
        t.push_back(r.t);
        e.push_back(r.E);
        m.push_back(r.m);
        inv.push_back(r.m < 0.0 ? -1.0 / r.m : std::nan(""));
      }
      const fs::path dir = resolve(out_dir, cfg.outputs.plot_dir);
      write_file(dir / "energy.svg", svg_line_chart("Energy", "t", "E(t)", t, e));
      write_file(dir / "min_slope.svg", svg_line_chart("Minimal slope", "t", "m(t)", t, m));
      write_file(dir / "reciprocal_slope.svg", svg_line_chart("Reciprocal slope", "t", "-1/m(t)", t, inv));
    }
    out << to_string(st.outcome.kind) << " t_final=" << format_double(st.outcome.t_final) << '\n';
    return exit_for(st.outcome.kind);
  });
}

int cmd_criteria(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_config(config);
    bool searched = false;
    const InitialDatum datum = resolve_datum(cfg, &searched);
    const auto grid = Grid::make(cfg.grid.L, cfg.grid.N);
    const double delta = cfg.dissipation.build().delta_sup();
    Json j;
    j["datum"] = datum_json(datum);
    j["datum_searched"] = searched;
    j["report"] = criteria_json(evaluate_criteria(datum, grid, delta, cfg.characteristics.x1));
    out << j.dump(2) << '\n';
    return kExitOk;
  });
}

int cmd_riccati(const RiccatiArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!a.coupled) {
      out << "delta,K,omega0,blew_up,T_numeric,T_bound\n";
      for (double d : a.delta) {
        for (double k : a.K) {
          for (double w : a.omega0) {
            const auto r = solve_omega(d, k, w, a.t_max);
            out << format_double(d) << ',' << format_double(k) << ',' << format_double(w) << ','
                << (r.blew_up ? "true" : "false") << ',' << opt_cell(r.blew_up ? r.T_numeric() : std::nullopt)
                << ',' << opt_cell(r.T_bound) << '\n';
          }
        }
      }
      return kExitOk;
    }
    out << "delta,K,phi0,psi0,blew_up,T_numeric,T_bound,g_inequality_margin,phi_increasing,psi_decreasing\n";
    for (double d : a.delta) {
      for (double k : a.K) {
        for (double p : a.phi0) {
          for (double q : a.psi0) {
            const auto r = solve_coupled(d, k, p, q, a.t_max);
            out << format_double(d) << ',' << format_double(k) << ',' << format_double(p) << ',' << format_double(q)
                << ',' << (r.blew_up ? "true" : "false") << ',' << opt_cell(r.blew_up ? r.T_numeric() : std::nullopt)
                << ',' << opt_cell(r.T_bound) << ',' << format_double(r.g_inequality_margin) << ','
                << (r.phi_increasing ? "true" : "false") << ',' << (r.psi_decreasing ? "true" : "false") << '\n';
          }
        }
      }
    }
    return kExitOk;
  });
}

std::vector<std::string> sweep_rows(const RunConfig& cfg, unsigned workers) {
  if (!cfg.sweep) throw ConfigError("config has no [sweep] section");
  const SweepSpec& sw = *cfg.sweep;
  if (sw.values.empty() || sw.deltas.empty()) throw ConfigError("[sweep] needs non-empty values and deltas");

  struct Cell {
    double value;
    double delta;
  };
  std::vector<Cell> cells;
  for (double v : sw.values) {
    for (double d : sw.deltas) cells.push_back({v, d});
  }
  std::vector<std::string> rows(cells.size() + 1);
  rows[0] =
      "index,param,value,delta,criterion1,criterion2,margin1,T1_bound,T2_bound,outcome,t_final,T_star,rate,"
      "energy_residual,error";

  auto run_cell = [&](std::size_t i) {
    const Cell& c = cells[i];
    RunConfig cell = cfg;
    cell.sweep.reset();
    if (sw.param == SweepParam::width) {
      cell.datum.width = c.value;
    } else {
      cell.datum.amplitude = c.value;
    }
    cell.dissipation = DissipationSpec{};
    cell.dissipation.value = c.delta;
    std::string prefix = std::to_string(i) + ',' + std::string(to_string(sw.param)) + ',' + format_double(c.value) +
                         ',' + format_double(c.delta) + ',';
    try {
      const StudyResult st = run_study(cell);
      const auto& r = st.criteria;
      rows[i + 1] = prefix + (r.criterion1_satisfied ? "true" : "false") + ',' +
                    (r.criterion2_satisfied ? "true" : "false") + ',' + format_double(r.margin1) + ',' +
                    opt_cell(r.T1_bound) + ',' + opt_cell(r.T2_bound) + ',' +
                    std::string(to_string(st.outcome.kind)) + ',' + format_double(st.outcome.t_final) + ',' +
                    opt_cell(st.rate ? std::optional(st.rate->T_star) : std::nullopt) + ',' +
                    opt_cell(st.rate ? std::optional(st.rate->rate) : std::nullopt) + ',' +
                    format_double(st.energy_residual) + ',';
    } catch (const std::exception& e) {
      rows[i + 1] = prefix + ",,,,,error,,,,," + csv_quote(e.what());
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

int cmd_sweep(const fs::path& config, const fs::path& out_dir, unsigned workers, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_config(config);
    const auto rows = sweep_rows(cfg, workers);
    std::string csv;
    for (const auto& r : rows) csv += r + '\n';
    const fs::path path = resolve(out_dir, cfg.sweep->output);
    write_file(path, csv);
    out << "wrote " << rows.size() - 1 << " rows to " << path.string() << '\n';
    return kExitOk;
  });
}

unsigned resolve_workers(std::optional<unsigned> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("CHBREAK_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace chbreak::cli
