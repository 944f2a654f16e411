#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <json.hpp>

#include "chbreak/cli/commands.hpp"
#include "chbreak/cli/config.hpp"
#include "chbreak/cli/output.hpp"
#include "chbreak/cli/study.hpp"

using namespace chbreak;
using namespace chbreak::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("chbreak_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : s) {
    if (c == '"') quoted = !quoted;
    if (c == sep && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out = split(s, '\n');
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kSmooth =
    "[grid]\nL = 30\nN = 512\n"
    "[datum]\nfamily = gaussian\namplitude = 0.5\nwidth = 1.5\n"
    "[dissipation]\nkind = constant\nvalue = 1\n"
    "[solver]\nt_end = 1\n";

struct ToolResult {
  int code;
  std::string out;
};

ToolResult tool(const std::string& args, const fs::path& dir) {
  const char* exe = std::getenv("CHBREAK_TOOL");
  if (!exe) return {-1, ""};
  const fs::path log = dir / "tool_stdout.txt";
  const std::string cmd = std::string("\"") + exe + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c, RunConfig{});
  EXPECT_EQ(c.grid.L, 30.0);
  EXPECT_EQ(c.grid.N, 1024u);
  EXPECT_EQ(c.solver.m_stop, -1e6);
  EXPECT_FALSE(c.sweep);
}

TEST(Config, RoundTripsThroughCanonicalText) {
  const std::string text =
      "# comment\n"
      "[grid]\nL = 25\nN = 2048\n"
      "[datum]\nfamily = antisym_peak\namplitude = 5\nwidth = 0.1\ncenter = 0.25\nsearch = mixed\n"
      "[dissipation]\nkind = piecewise_table\ntimes = 0, 0.5, 1\nvalues = 0.1, 0.3, 0.2\ndelta_sup = 0.4\n"
      "[solver]\nscheme = lagrangian\nt_end = 2\ncfl_factor = 0.15\nc_m = 0.1\nrecord_stride = 4\n"
      "[outputs]\nrecords = r.csv\nplots = true\n; full-line comment\ntiming = true\n"
      "[characteristics]\nseeds = -1, 0.5\ntrack_x1 = true\nx1 = 0.3\n"
      "[sweep]\nparam = amplitude\nvalues = 1, 2\ndeltas = 0, 0.1\n";
  const RunConfig c = parse_config(text);
  EXPECT_EQ(c.datum.family, InitialDatum::Family::antisym_peak);
  EXPECT_EQ(c.datum.search, BreakingCriterion::mixed);
  EXPECT_EQ(c.dissipation.values, (std::vector<double>{0.1, 0.3, 0.2}));
  EXPECT_EQ(c.solver.scheme, Scheme::lagrangian);
  EXPECT_TRUE(c.outputs.plots);
  EXPECT_EQ(c.characteristics.seeds, (std::vector<double>{-1.0, 0.5}));
  EXPECT_EQ(*c.characteristics.x1, 0.3);
  ASSERT_TRUE(c.sweep);
  EXPECT_EQ(c.sweep->param, SweepParam::amplitude);
  const std::string canon = emit_config(c);
  EXPECT_EQ(parse_config(canon), c);
  EXPECT_EQ(emit_config(parse_config(canon)), canon);
}

TEST(Config, RoundTripsEveryDissipationKind) {
  for (const char* body : {"kind = constant\nvalue = 0.7\n", "kind = linear_ramp\nlambda0 = 0.1\nslope = 0.05\n"
                                                             "delta_sup = 0.2\n",
                           "kind = sinusoidal\nmean = 0.1\namplitude = 0.3\nomega = 2\nphase = 0.1\n"}) {
    const RunConfig c = parse_config(std::string("[dissipation]\n") + body);
    EXPECT_EQ(parse_config(emit_config(c)), c) << body;
  }
}

TEST(Config, DoublesRoundTripExactly) {
  for (double v : {0.1, 1.0 / 3.0, -1e6, 6.02214076e23, 5e-324, 0.30000000000000004}) {
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
  }
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(config_error("[grid]\nL = 10\nM = 3\n"), "cfg:3: unknown key 'M' in [grid]");
  EXPECT_NE(config_error("[grids]\n").find("cfg:1:"), std::string::npos);
  EXPECT_NE(config_error("[grid]\nL = 1\nL = 2\n").find("cfg:3:"), std::string::npos);
  EXPECT_NE(config_error("[grid]\nL = abc\n").find("cfg:2:"), std::string::npos);
  EXPECT_NE(config_error("[grid]\nN = -4\n").find("cfg:2:"), std::string::npos);
  EXPECT_NE(config_error("L = 1\n").find("cfg:1:"), std::string::npos);
  EXPECT_NE(config_error("[grid]\njust text\n").find("cfg:2:"), std::string::npos);
  EXPECT_NE(config_error("[datum]\nfamily = cubic\n").find("cfg:2:"), std::string::npos);
}

TEST(Config, KeysMustApplyToTheChosenKind) {
  EXPECT_NE(config_error("[dissipation]\nkind = constant\n\nomega = 2\n").find("cfg:4:"), std::string::npos);
  EXPECT_NE(config_error("[dissipation]\nkind = sinusoidal\nvalue = 2\n").find("cfg:3:"), std::string::npos);
  EXPECT_NE(config_error("[datum]\nfamily = gaussian\nsamples = 1, 2\n").find("cfg:3:"), std::string::npos);
  EXPECT_NE(config_error("[dissipation]\nkind = linear_ramp\nlambda0 = 1\n"), "");
  EXPECT_EQ(config_error("[dissipation]\nkind = linear_ramp\nlambda0 = 1\ndelta_sup = 1\n"), "");
}

TEST(Simulate, ZeroDatumHasZeroEnergyColumn) {
  TempDir d;
  const fs::path cfg = d.write("zero.ini", "[grid]\nN = 128\n[datum]\namplitude = 0\n[solver]\nt_end = 0.5\n");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_simulate(cfg, d.path(), out, err), kExitOk) << err.str();
  EXPECT_EQ(out.str(), "reached_horizon t_final=0.5\n");
  const auto rows = lines(slurp(d.path() / "records.csv"));
  ASSERT_GT(rows.size(), 2u);
  EXPECT_EQ(rows[0], "t,E,m,x_argmin,sup_abs_u,dt,lambda_int");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(split(rows[i], ',')[1], "0");
  const auto j = nlohmann::json::parse(slurp(d.path() / "summary.json"));
  EXPECT_EQ(j["outcome"]["kind"], "reached_horizon");
  EXPECT_FALSE(j["criteria"]["criterion1_satisfied"].get<bool>());
}

TEST(Simulate, UnitDissipationSummaryResidual) {
  TempDir d;
  const fs::path cfg = d.write("smooth.ini", kSmooth);
  std::ostringstream out, err;
  ASSERT_EQ(cmd_simulate(cfg, d.path(), out, err), kExitOk) << err.str();
  const auto j = nlohmann::json::parse(slurp(d.path() / "summary.json"));
  EXPECT_LT(j["energy"]["law_max_residual"].get<double>(), 1e-7);
  EXPECT_NEAR(j["energy"]["E_final"].get<double>() / j["energy"]["E0"].get<double>(), std::exp(-2.0), 1e-7);
  EXPECT_EQ(j["schema_version"], kOutputSchemaVersion);
  EXPECT_EQ(j["config"], emit_config(parse_config(kSmooth)));
  EXPECT_FALSE(j.contains("wall_time_s"));
  EXPECT_TRUE(j["amplitude"]["within_bound"].get<bool>());
}

TEST(Simulate, RerunsAreByteIdentical) {
  TempDir d;
  const fs::path cfg = d.write("smooth.ini", std::string(kSmooth) + "[characteristics]\nseeds = 0.5\n");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_simulate(cfg, d.path() / "a", out, err), kExitOk);
  ASSERT_EQ(cmd_simulate(cfg, d.path() / "b", out, err), kExitOk);
  EXPECT_EQ(slurp(d.path() / "a" / "summary.json"), slurp(d.path() / "b" / "summary.json"));
  EXPECT_EQ(slurp(d.path() / "a" / "records.csv"), slurp(d.path() / "b" / "records.csv"));
}

TEST(Simulate, TimingAndPlotsAreOptIn) {
  TempDir d;
  const fs::path cfg = d.write("t.ini", std::string(kSmooth) + "[outputs]\ntiming = true\nplots = true\n");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_simulate(cfg, d.path(), out, err), kExitOk);
  const auto j = nlohmann::json::parse(slurp(d.path() / "summary.json"));
  EXPECT_TRUE(j.contains("wall_time_s"));
  for (const char* name : {"energy.svg", "min_slope.svg", "reciprocal_slope.svg"}) {
    const std::string svg = slurp(d.path() / "plots" / name);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u) << name;
  }
}

TEST(Simulate, ExitCodes) {
  TempDir d;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_simulate(d.write("bad.ini", "[grid]\nQ = 1\n"), d.path(), out, err), kExitConfig);
  EXPECT_NE(err.str().find("bad.ini:2:"), std::string::npos);
  EXPECT_EQ(cmd_simulate(d.write("n.ini", "[grid]\nN = 100\n"), d.path(), out, err), kExitConfig);
  EXPECT_EQ(cmd_simulate(d.path() / "missing.ini", d.path(), out, err), kExitConfig);
  const fs::path edge = d.write("edge.ini", "[grid]\nL = 8\nN = 256\n[datum]\namplitude = 0.5\n");
  out.str("");
  EXPECT_EQ(cmd_simulate(edge, d.path(), out, err), kExitNumerical);
  EXPECT_EQ(out.str().rfind("edge_decay_lost", 0), 0u);
}

TEST(Criteria, ZeroDatumUnsatisfied) {
  TempDir d;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_criteria(d.write("z.ini", "[datum]\namplitude = 0\n"), out, err), kExitOk);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_FALSE(j["report"]["criterion1_satisfied"].get<bool>());
  EXPECT_FALSE(j["report"]["criterion2_satisfied"].get<bool>());
  EXPECT_EQ(j["report"]["K"], 0.0);
}

TEST(Criteria, UnitEnergyThreshold) {
  const auto g = Grid::make(20.0, 256);
  Field u = make_datum(InitialDatum::gaussian(1.0, 1.0), g);
  const double c = 1.0 / std::sqrt(h1_norm_sq(u));
  std::string samples;
  for (std::size_t j = 0; j < u.size(); ++j) samples += (j ? ", " : "") + format_double(c * u[j]);
  TempDir d;
  const fs::path cfg =
      d.write("unit.ini", "[grid]\nL = 20\nN = 256\n[datum]\nfamily = samples\nsamples = " + samples + "\n");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_criteria(cfg, out, err), kExitOk) << err.str();
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_NEAR(j["report"]["E0"].get<double>(), 1.0, 1e-14);
  EXPECT_NEAR(j["report"]["threshold_slope"].get<double>(), -2.5327, 1e-4);
  EXPECT_EQ(j["report"]["slope_source"], "grid");
}

TEST(Criteria, SearchedDatumHasMargin) {
  TempDir d;
  const fs::path cfg = d.write("s.ini",
                               "[grid]\nL = 25\nN = 4096\n[datum]\nfamily = gaussian_derivative\namplitude = 5\n"
                               "search = slope_only\n[dissipation]\nvalue = 0.1\n");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_criteria(cfg, out, err), kExitOk) << err.str();
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_TRUE(j["datum_searched"].get<bool>());
  EXPECT_TRUE(j["report"]["criterion1_satisfied"].get<bool>());
  EXPECT_GE(j["report"]["margin1"].get<double>(), 0.1);
}

TEST(Riccati, TableRows) {
  RiccatiArgs a;
  a.delta = {0.0};
  a.K = {0.0, 4.0};
  a.omega0 = {-1.0, -4.0, 0.0};
  std::ostringstream out, err;
  ASSERT_EQ(cmd_riccati(a, out, err), kExitOk);
  const auto rows = lines(out.str());
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], "delta,K,omega0,blew_up,T_numeric,T_bound");
  const auto first = split(rows[1], ',');
  EXPECT_NEAR(std::stod(first[4]), 2.0, 1e-4);
  int none_rows = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = split(rows[i], ',');
    if (f[4] == "none") {
      ++none_rows;
      EXPECT_EQ(f[3], "false");
      continue;
    }
    EXPECT_LE(std::stod(f[4]), std::stod(f[5]) + 1e-3) << rows[i];
  }
  EXPECT_GE(none_rows, 2);
}

TEST(Riccati, CoupledTable) {
  RiccatiArgs a;
  a.coupled = true;
  a.delta = {0.2};
  a.K = {1.0};
  a.phi0 = {5.0};
  a.psi0 = {-4.0};
  std::ostringstream out, err;
  ASSERT_EQ(cmd_riccati(a, out, err), kExitOk);
  const auto rows = lines(out.str());
  ASSERT_EQ(rows.size(), 2u);
  const auto f = split(rows[1], ',');
  EXPECT_EQ(f[4], "true");
  EXPECT_LE(std::stod(f[5]), std::stod(f[6]) + 1e-3);
  EXPECT_EQ(f[8], "true");
  EXPECT_EQ(f[9], "true");
}

TEST(Sweep, SingleCellMatchesStudy) {
  RunConfig c = parse_config(
      "[grid]\nN = 512\n[datum]\namplitude = 0.5\n[solver]\nt_end = 0.5\n"
      "[sweep]\nvalues = 1.5\ndeltas = 0.3\n");
  const auto rows = sweep_rows(c, 1);
  ASSERT_EQ(rows.size(), 2u);
  RunConfig single = c;
  single.sweep.reset();
  single.datum.width = 1.5;
  single.dissipation.value = 0.3;
  const StudyResult st = run_study(single);
  const auto f = split(rows[1], ',');
  EXPECT_EQ(f[0], "0");
  EXPECT_EQ(f[1], "width");
  EXPECT_EQ(f[4], st.criteria.criterion1_satisfied ? "true" : "false");
  EXPECT_EQ(f[6], format_double(st.criteria.margin1));
  EXPECT_EQ(f[9], std::string(to_string(st.outcome.kind)));
  EXPECT_EQ(f[10], format_double(st.outcome.t_final));
  EXPECT_EQ(f[13], format_double(st.energy_residual));
  EXPECT_EQ(f[14], "");
}

TEST(Sweep, CriterionFlagMonotoneInWidth) {
  RunConfig c = parse_config(
      "[grid]\nL = 25\nN = 2048\n[datum]\nfamily = gaussian_derivative\namplitude = 5\n"
      "[solver]\nscheme = lagrangian\nt_end = 0.01\n"
      "[sweep]\nvalues = 0.5, 0.3, 0.2, 0.15, 0.12, 0.1, 0.08\ndeltas = 0.1\n");
  const auto rows = sweep_rows(c, 2);
  ASSERT_EQ(rows.size(), 8u);
  bool seen_true = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const bool sat = split(rows[i], ',')[4] == "true";
    if (seen_true) EXPECT_TRUE(sat) << rows[i];
    seen_true = seen_true || sat;
  }
  EXPECT_TRUE(seen_true);
  EXPECT_EQ(split(rows[1], ',')[4], "false");
}

TEST(Sweep, DeterministicAcrossWorkerCounts) {
  RunConfig c = parse_config(
      "[grid]\nN = 256\n[datum]\namplitude = 0.5\n[solver]\nt_end = 0.3\n"
      "[sweep]\nvalues = 1, 1.5, 2, 40\ndeltas = 0, 0.2\n");
  const auto a = sweep_rows(c, 1);
  const auto b = sweep_rows(c, 3);
  EXPECT_EQ(a, b);
  // The width-40 cells fail the edge check and are reported in-row.
  const auto bad = split(a[7], ',');
  EXPECT_EQ(bad[9], "error");
  EXPECT_NE(bad[14], "");
  EXPECT_EQ(split(a[1], ',')[14], "");
}

TEST(Sweep, CommandWritesCsv) {
  TempDir d;
  const fs::path cfg = d.write("sw.ini", "[grid]\nN = 256\n[datum]\namplitude = 0.5\n[solver]\nt_end = 0.2\n"
                                         "[sweep]\nvalues = 1, 2\ndeltas = 0\noutput = out/sweep.csv\n");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_sweep(cfg, d.path(), 2, out, err), kExitOk);
  const std::string first = slurp(d.path() / "out" / "sweep.csv");
  ASSERT_EQ(cmd_sweep(cfg, d.path(), 1, out, err), kExitOk);
  EXPECT_EQ(slurp(d.path() / "out" / "sweep.csv"), first);
  EXPECT_EQ(lines(first).size(), 3u);
  EXPECT_EQ(cmd_sweep(d.write("nosweep.ini", "[grid]\nN = 256\n"), d.path(), 1, out, err), kExitConfig);
}

TEST(Workers, FlagThenEnvironmentThenHardware) {
  ::unsetenv("CHBREAK_WORKERS");
  EXPECT_GE(resolve_workers(std::nullopt), 1u);
  ::setenv("CHBREAK_WORKERS", "3", 1);
  EXPECT_EQ(resolve_workers(std::nullopt), 3u);
  EXPECT_EQ(resolve_workers(5u), 5u);
  ::setenv("CHBREAK_WORKERS", "zero", 1);
  EXPECT_GE(resolve_workers(std::nullopt), 1u);
  ::unsetenv("CHBREAK_WORKERS");
}

TEST(Tool, VersionAndUsageErrors) {
  if (!std::getenv("CHBREAK_TOOL")) GTEST_SKIP() << "CHBREAK_TOOL not set";
  TempDir d;
  const ToolResult v = tool("version", d.path());
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, "chbreak 1.0.0\n");
  EXPECT_EQ(tool("", d.path()).code, kExitConfig);
  EXPECT_EQ(tool("frobnicate", d.path()).code, kExitConfig);
  EXPECT_EQ(tool("riccati --delta x", d.path()).code, kExitConfig);
}

TEST(Tool, RiccatiAndSimulate) {
  if (!std::getenv("CHBREAK_TOOL")) GTEST_SKIP() << "CHBREAK_TOOL not set";
  TempDir d;
  const ToolResult r = tool("riccati --delta 0 --K 0 --omega0 -1,0", d.path());
  ASSERT_EQ(r.code, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(split(rows[2], ',')[4], "none");
  const fs::path cfg = d.write("smooth.ini", kSmooth);
  const ToolResult s = tool("simulate \"" + cfg.string() + "\" -o \"" + (d.path() / "run").string() + "\"", d.path());
  EXPECT_EQ(s.code, 0) << s.out;
  EXPECT_TRUE(fs::exists(d.path() / "run" / "summary.json"));
  const ToolResult bad = tool("simulate \"" + d.write("b.ini", "[solver]\nt_end = -1\n").string() + "\"", d.path());
  EXPECT_EQ(bad.code, kExitConfig);
}
