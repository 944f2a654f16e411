#include "chbreak/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace chbreak::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line;
};

using Section = std::map<std::string, Entry>;

class Reader {
 public:
  Reader(const std::string& source) : source_(source) {}

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const { throw ConfigError(source_, line, msg); }

  double number(const Entry& e, const std::string& key) const {
    const std::string_view v = trim(e.value);
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || v.empty()) {
      fail(e.line, "'" + key + "' expects a number, got '" + std::string(v) + "'");
    }
    if (!std::isfinite(out)) fail(e.line, "'" + key + "' must be finite");
    return out;
  }

  std::size_t count(const Entry& e, const std::string& key) const {
    const std::string_view v = trim(e.value);
    std::size_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || v.empty()) {
      fail(e.line, "'" + key + "' expects a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
  }

  bool flag(const Entry& e, const std::string& key) const {
    const std::string_view v = trim(e.value);
    if (v == "true") return true;
    if (v == "false") return false;
    fail(e.line, "'" + key + "' expects true or false, got '" + std::string(v) + "'");
  }

  std::vector<double> list(const Entry& e, const std::string& key) const {
    std::vector<double> out;
    std::string_view rest = trim(e.value);
    if (rest.empty()) return out;
    while (true) {
      const auto comma = rest.find(',');
      const Entry item{std::string(trim(rest.substr(0, comma))), e.line};
      out.push_back(number(item, key));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

 private:
  std::string source_;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"grid", {"L", "N"}},
      {"datum", {"family", "amplitude", "width", "center", "samples", "search"}},
      {"dissipation",
       {"kind", "value", "lambda0", "slope", "mean", "amplitude", "omega", "phase", "times", "values", "delta_sup"}},
      {"solver",
       {"scheme", "t_end", "cfl_factor", "c_m", "dt_min", "m_stop", "record_stride", "resolution_tol"}},
      {"outputs", {"records", "summary", "plots", "plot_dir", "timing"}},
      {"characteristics", {"seeds", "track_x1", "x1"}},
      {"sweep", {"param", "values", "deltas", "output"}},
  };
  return keys;
}

std::set<std::string> dissipation_keys(DissipationProfile::Kind kind) {
  using K = DissipationProfile::Kind;
  switch (kind) {
    case K::constant: return {"kind", "value", "delta_sup"};
    case K::linear_ramp: return {"kind", "lambda0", "slope", "delta_sup"};
    case K::sinusoidal: return {"kind", "mean", "amplitude", "omega", "phase", "delta_sup"};
    case K::piecewise_table: return {"kind", "times", "values", "delta_sup"};
  }
  return {};
}

std::optional<DissipationProfile::Kind> parse_kind(std::string_view s) {
  using K = DissipationProfile::Kind;
  for (K k : {K::constant, K::linear_ramp, K::sinusoidal, K::piecewise_table}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message) {}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string_view to_string(SweepParam p) { return p == SweepParam::width ? "width" : "amplitude"; }

InitialDatum DatumSpec::build() const {
  using F = InitialDatum::Family;
  switch (family) {
    case F::gaussian: return InitialDatum::gaussian(amplitude, width, center);
    case F::gaussian_derivative: return InitialDatum::gaussian_derivative(amplitude, width, center);
    case F::sech_squared: return InitialDatum::sech_squared(amplitude, width, center);
    case F::antisym_peak: return InitialDatum::antisym_peak(amplitude, width, center);
    case F::samples: return InitialDatum::from_samples(samples);
  }
  throw PreconditionError("unknown datum family");
}

DissipationProfile DissipationSpec::build() const {
  using K = DissipationProfile::Kind;
  switch (kind) {
    case K::constant: return DissipationProfile::constant(value, delta_sup);
    case K::linear_ramp:
      if (!delta_sup) throw PreconditionError("linear_ramp dissipation needs delta_sup");
      return DissipationProfile::linear_ramp(lambda0, slope, *delta_sup);
    case K::sinusoidal: return DissipationProfile::sinusoidal(mean, amplitude, omega, phase, delta_sup);
    case K::piecewise_table: return DissipationProfile::piecewise_table(times, values, delta_sup);
  }
  throw PreconditionError("unknown dissipation kind");
}

SolverConfig RunConfig::solver_config(const InitialDatum& d) const {
  SolverConfig c;
  c.half_length = grid.L;
  c.n_points = grid.N;
  c.datum = d;
  c.profile = dissipation.build();
  c.t_end = solver.t_end;
  c.cfl_factor = solver.cfl_factor;
  c.slope_dt_factor = solver.c_m;
  c.dt_min = solver.dt_min;
  c.m_stop = solver.m_stop;
  c.record_stride = solver.record_stride;
  c.scheme = solver.scheme;
  c.resolution_tol = solver.resolution_tol;
  return c;
}

RunConfig parse_config(std::string_view text, const std::string& source) {
  const Reader rd(source);
  std::map<std::string, Section> sections;
  std::map<std::string, std::size_t> section_line;
  std::string current;
  std::size_t line_no = 0;

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') rd.fail(line_no, "malformed section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_keys().count(current)) rd.fail(line_no, "unknown section [" + current + "]");
      if (section_line.count(current)) rd.fail(line_no, "duplicate section [" + current + "]");
      section_line[current] = line_no;
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) rd.fail(line_no, "expected 'key = value'");
    if (current.empty()) rd.fail(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!known_keys().at(current).count(key)) rd.fail(line_no, "unknown key '" + key + "' in [" + current + "]");
    if (sections[current].count(key)) rd.fail(line_no, "duplicate key '" + key + "'");
    sections[current][key] = Entry{value, line_no};
  }

  RunConfig cfg;
  auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
    const auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };

  if (auto e = get("grid", "L")) cfg.grid.L = rd.number(*e, "L");
  if (auto e = get("grid", "N")) cfg.grid.N = rd.count(*e, "N");

  // [datum]
  if (auto e = get("datum", "family")) {
    const auto f = parse_family(e->value);
    if (!f) rd.fail(e->line, "unknown datum family '" + e->value + "'");
    cfg.datum.family = *f;
  }
  const bool sampled = cfg.datum.family == InitialDatum::Family::samples;
  for (const char* key : {"amplitude", "width", "center", "search"}) {
    if (auto e = get("datum", key); e && sampled) rd.fail(e->line, std::string("'") + key + "' does not apply to samples");
  }
  if (auto e = get("datum", "samples"); e && !sampled) rd.fail(e->line, "'samples' needs family = samples");
  if (auto e = get("datum", "amplitude")) cfg.datum.amplitude = rd.number(*e, "amplitude");
  if (auto e = get("datum", "width")) cfg.datum.width = rd.number(*e, "width");
  if (auto e = get("datum", "center")) cfg.datum.center = rd.number(*e, "center");
  if (auto e = get("datum", "samples")) cfg.datum.samples = rd.list(*e, "samples");
  if (auto e = get("datum", "search")) {
    const auto c = parse_criterion(e->value);
    if (!c) rd.fail(e->line, "search expects slope_only or mixed");
    using F = InitialDatum::Family;
    if (cfg.datum.family != F::gaussian_derivative && cfg.datum.family != F::antisym_peak) {
      rd.fail(e->line, "search needs family gaussian_derivative or antisym_peak");
    }
    cfg.datum.search = c;
  }

  // [dissipation]
  if (auto e = get("dissipation", "kind")) {
    const auto k = parse_kind(e->value);
    if (!k) rd.fail(e->line, "unknown dissipation kind '" + e->value + "'");
    cfg.dissipation.kind = *k;
  }
  if (sections.count("dissipation")) {
    const auto allowed = dissipation_keys(cfg.dissipation.kind);
    for (const auto& [key, e] : sections["dissipation"]) {
      if (!allowed.count(key)) {
        rd.fail(e.line, "'" + key + "' does not apply to dissipation kind " +
                            std::string(to_string(cfg.dissipation.kind)));
      }
    }
  }
  auto& d = cfg.dissipation;
  for (auto [key, slot] : {std::pair{"value", &d.value}, std::pair{"lambda0", &d.lambda0},
                           std::pair{"slope", &d.slope}, std::pair{"mean", &d.mean},
                           std::pair{"amplitude", &d.amplitude}, std::pair{"omega", &d.omega},
                           std::pair{"phase", &d.phase}}) {
    if (auto e = get("dissipation", key)) *slot = rd.number(*e, key);
  }
  if (auto e = get("dissipation", "times")) d.times = rd.list(*e, "times");
  if (auto e = get("dissipation", "values")) d.values = rd.list(*e, "values");
  if (auto e = get("dissipation", "delta_sup")) d.delta_sup = rd.number(*e, "delta_sup");
  if (d.kind == DissipationProfile::Kind::linear_ramp && !d.delta_sup) {
    rd.fail(section_line.count("dissipation") ? section_line["dissipation"] : 0, "linear_ramp needs delta_sup");
  }

  // [solver]
  if (auto e = get("solver", "scheme")) {
    const auto s = parse_scheme(e->value);
    if (!s) rd.fail(e->line, "scheme expects spectral or lagrangian");
    cfg.solver.scheme = *s;
  }
  auto& s = cfg.solver;
  for (auto [key, slot] : {std::pair{"t_end", &s.t_end}, std::pair{"cfl_factor", &s.cfl_factor},
                           std::pair{"c_m", &s.c_m}, std::pair{"dt_min", &s.dt_min}, std::pair{"m_stop", &s.m_stop},
                           std::pair{"resolution_tol", &s.resolution_tol}}) {
    if (auto e = get("solver", key)) *slot = rd.number(*e, key);
  }
  if (auto e = get("solver", "record_stride")) s.record_stride = rd.count(*e, "record_stride");

  // [outputs]
  if (auto e = get("outputs", "records")) cfg.outputs.records = e->value;
  if (auto e = get("outputs", "summary")) cfg.outputs.summary = e->value;
  if (auto e = get("outputs", "plots")) cfg.outputs.plots = rd.flag(*e, "plots");
  if (auto e = get("outputs", "plot_dir")) cfg.outputs.plot_dir = e->value;
  if (auto e = get("outputs", "timing")) cfg.outputs.timing = rd.flag(*e, "timing");

  // [characteristics]
  if (auto e = get("characteristics", "seeds")) cfg.characteristics.seeds = rd.list(*e, "seeds");
  if (auto e = get("characteristics", "track_x1")) cfg.characteristics.track_x1 = rd.flag(*e, "track_x1");
  if (auto e = get("characteristics", "x1")) cfg.characteristics.x1 = rd.number(*e, "x1");

  // [sweep]
  if (sections.count("sweep")) {
    SweepSpec sw;
    if (auto e = get("sweep", "param")) {
      if (e->value == "width") {
        sw.param = SweepParam::width;
      } else if (e->value == "amplitude") {
        sw.param = SweepParam::amplitude;
      } else {
        rd.fail(e->line, "sweep param expects width or amplitude");
      }
    }
    if (auto e = get("sweep", "values")) sw.values = rd.list(*e, "values");
    if (auto e = get("sweep", "deltas")) sw.deltas = rd.list(*e, "deltas");
    if (auto e = get("sweep", "output")) sw.output = e->value;
    cfg.sweep = sw;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream o;
  auto kv = [&o](const char* key, const std::string& value) { o << key << " = " << value << '\n'; };
  auto num = [&kv](const char* key, double v) { kv(key, format_double(v)); };
  auto flag = [&kv](const char* key, bool v) { kv(key, v ? "true" : "false"); };

  o << "[grid]\n";
  num("L", c.grid.L);
  kv("N", std::to_string(c.grid.N));

  o << "\n[datum]\n";
  kv("family", std::string(to_string(c.datum.family)));
  if (c.datum.family == InitialDatum::Family::samples) {
    kv("samples", join(c.datum.samples));
  } else {
    num("amplitude", c.datum.amplitude);
    num("width", c.datum.width);
    num("center", c.datum.center);
    if (c.datum.search) kv("search", std::string(to_string(*c.datum.search)));
  }

  o << "\n[dissipation]\n";
  const auto& d = c.dissipation;
  kv("kind", std::string(to_string(d.kind)));
  using K = DissipationProfile::Kind;
  switch (d.kind) {
    case K::constant: num("value", d.value); break;
    case K::linear_ramp:
      num("lambda0", d.lambda0);
      num("slope", d.slope);
      break;
    case K::sinusoidal:
      num("mean", d.mean);
      num("amplitude", d.amplitude);
      num("omega", d.omega);
      num("phase", d.phase);
      break;
    case K::piecewise_table:
      kv("times", join(d.times));
      kv("values", join(d.values));
      break;
  }
  if (d.delta_sup) num("delta_sup", *d.delta_sup);

  o << "\n[solver]\n";
  kv("scheme", std::string(to_string(c.solver.scheme)));
  num("t_end", c.solver.t_end);
  num("cfl_factor", c.solver.cfl_factor);
  num("c_m", c.solver.c_m);
  num("dt_min", c.solver.dt_min);
  num("m_stop", c.solver.m_stop);
  kv("record_stride", std::to_string(c.solver.record_stride));
  num("resolution_tol", c.solver.resolution_tol);

  o << "\n[outputs]\n";
  kv("records", c.outputs.records);
  kv("summary", c.outputs.summary);
  flag("plots", c.outputs.plots);
  kv("plot_dir", c.outputs.plot_dir);
  flag("timing", c.outputs.timing);

  o << "\n[characteristics]\n";
  kv("seeds", join(c.characteristics.seeds));
  flag("track_x1", c.characteristics.track_x1);
  if (c.characteristics.x1) num("x1", *c.characteristics.x1);

  if (c.sweep) {
    o << "\n[sweep]\n";
    kv("param", std::string(to_string(c.sweep->param)));
    kv("values", join(c.sweep->values));
    kv("deltas", join(c.sweep->deltas));
    kv("output", c.sweep->output);
  }
  return o.str();
}

}  // namespace chbreak::cli
