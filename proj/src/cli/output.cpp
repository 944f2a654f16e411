#include "chbreak/cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chbreak::cli {

namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json track_json(const TrackReport& t) {
  Json j;
  j["seed"] = t.seed;
  j["n_samples"] = t.n_samples;
  j["unreliable_samples"] = t.unreliable_samples;
  j["edge_contaminated"] = t.edge_contaminated;
  j["q_final"] = t.q_final;
  j["ux_final"] = t.ux_final;
  j["rate"] = rate_json(t.rate);
  j["diffeo_factor"] = finite_or_null(t.diffeo_factor);
  j["sign_condition_initial"] = t.sign_condition_initial;
  j["sign_condition_kept"] = t.sign_condition_kept;
  j["g_max_decrease"] = t.g_max_decrease;
  j["g_excess"] = t.g_excess;
  return j;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Json criteria_json(const CriterionReport& r) {
  Json j;
  j["E0"] = r.E0;
  j["K"] = r.K;
  j["delta"] = r.delta;
  j["sqrt_delta2_plus_2K"] = r.s;
  j["threshold_slope"] = r.threshold_slope;
  j["min_slope"] = r.min_slope;
  j["x0"] = r.x0;
  j["slope_source"] = r.slope_analytic ? "analytic" : "grid";
  j["omega0"] = r.min_slope;
  j["criterion1_satisfied"] = r.criterion1_satisfied;
  j["margin1"] = r.margin1;
  j["T1_bound"] = opt(r.T1_bound);
  j["x1"] = opt(r.x1);
  j["u0_x1"] = r.u0_x1;
  j["u0x_x1"] = r.u0x_x1;
  j["mixed_threshold"] = r.mixed_threshold;
  j["criterion2_satisfied"] = r.criterion2_satisfied;
  j["margin2"] = r.margin2;
  j["g0"] = opt(r.g0);
  j["T2_bound"] = opt(r.T2_bound);
  if (r.location_interval) {
    j["location_interval"] = Json::array({r.location_interval->first, r.location_interval->second});
  } else {
    j["location_interval"] = nullptr;
  }
  return j;
}

Json rate_json(const std::optional<RateEstimate>& r) {
  if (!r) return nullptr;
  Json j;
  j["T_star"] = r->T_star;
  j["rate"] = r->rate;
  j["window"] = Json::array({r->window_start, r->window_end});
  j["fit_residual"] = r->fit_residual;
  j["n_points"] = r->n_points;
  return j;
}

Json datum_json(const InitialDatum& d) {
  Json j;
  j["family"] = std::string(to_string(d.family));
  if (d.family == InitialDatum::Family::samples) {
    j["n_samples"] = d.samples.size();
  } else {
    j["amplitude"] = d.amplitude;
    j["width"] = d.width;
    j["center"] = d.center;
  }
  return j;
}

Json summary_json(const RunConfig& cfg, const StudyResult& st) {
  Json j;
  j["artifact"] = {{"name", "chbreak"}, {"version", std::string(kVersion)}};
  j["schema_version"] = kOutputSchemaVersion;
  j["config"] = emit_config(cfg);
  j["scheme"] = std::string(to_string(st.solver.scheme));
  j["datum"] = datum_json(st.datum);
  j["datum_searched"] = st.searched;

  const auto& out = st.outcome;
  j["outcome"] = {{"kind", std::string(to_string(out.kind))},
                  {"t_final", out.t_final},
                  {"steps", out.steps},
                  {"rejected_steps", out.rejected_steps},
                  {"records", out.records.size()},
                  {"final_m", out.records.back().m},
                  {"final_x_argmin", out.records.back().x_argmin},
                  {"breaking_label", opt(out.breaking_label)}};
  j["dissipative"] = st.dissipative;
  j["energy"] = {{"E0", st.E0},
                 {"E_final", out.records.back().E},
                 {"law_max_residual", st.energy_residual}};
  j["amplitude"] = {{"bound", st.amplitude_bound},
                    {"max_sup_abs_u", st.max_sup_abs_u},
                    {"within_bound", st.max_sup_abs_u <= st.amplitude_bound + 1e-3}};
  j["criteria"] = criteria_json(st.criteria);
  j["rate"] = rate_json(st.rate);

  Json bounds;
  bounds["T_star"] = st.rate ? Json(st.rate->T_star) : Json(nullptr);
  bounds["t_final"] = out.t_final;
  bounds["T1_bound"] = opt(st.criteria.T1_bound);
  bounds["T2_bound"] = opt(st.criteria.T2_bound);
  const bool broke = out.kind == OutcomeKind::breaking_detected;
  bounds["T_star_within_T1"] = (broke && st.rate && st.criteria.T1_bound)
                                   ? Json(st.rate->T_star <= *st.criteria.T1_bound * 1.02)
                                   : Json(nullptr);
  bounds["T_star_within_T2"] = (broke && st.rate && st.criteria.T2_bound)
                                   ? Json(st.rate->T_star <= *st.criteria.T2_bound * 1.02)
                                   : Json(nullptr);
  j["bounds"] = bounds;

  Json location;
  if (st.criteria.location_interval) {
    location["interval"] = Json::array({st.criteria.location_interval->first, st.criteria.location_interval->second});
  } else {
    location["interval"] = nullptr;
  }
  location["x_argmin_final"] = out.records.back().x_argmin;
  location["inside"] = st.location_inside ? Json(*st.location_inside) : Json(nullptr);
  j["location"] = location;

  Json tracks = Json::array();
  for (const auto& t : st.tracks) tracks.push_back(track_json(t));
  j["tracks"] = tracks;
  j["x1_track"] = st.x1_track ? Json(*st.x1_track) : Json(nullptr);

  j["comparison"] = {{"delta", st.comparison.delta},
                     {"omega0", st.comparison.omega0},
                     {"common_samples", st.comparison.common_samples},
                     {"max_m_minus_omega", st.comparison.max_excess},
                     {"omega_blowup", opt(st.comparison.omega_blowup)}};
  j["slope_budget"] = {{"evaluated", st.budget.evaluated},
                       {"max_m_prime_excess", st.budget.max_m_prime_excess},
                       {"max_abs_H", st.budget.max_abs_H},
                       {"H_bound", st.budget.H_bound}};
  if (cfg.outputs.timing) j["wall_time_s"] = st.wall_time_s;
  return j;
}

std::string records_csv(std::span<const DiagnosticsRecord> records) {
  std::string out = "t,E,m,x_argmin,sup_abs_u,dt,lambda_int\n";
  for (const auto& r : records) {
    for (double v : {r.t, r.E, r.m, r.x_argmin, r.sup_abs_u, r.dt}) {
      out += format_double(v);
      out += ',';
    }
    out += format_double(r.lambda_int);
    out += '\n';
  }
  return out;
}

std::string svg_line_chart(std::string_view title, std::string_view x_label, std::string_view y_label,
                           std::span<const double> x, std::span<const double> y) {
  constexpr double W = 640, H = 400, left = 70, right = 20, top = 40, bottom = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (std::isfinite(x[i]) && std::isfinite(y[i])) pts.emplace_back(x[i], y[i]);
  }
  if (!pts.empty()) {
    x0 = x1 = pts.front().first;
    y0 = y1 = pts.front().second;
    for (const auto& [a, b] : pts) {
      x0 = std::min(x0, a);
      x1 = std::max(x1, a);
      y0 = std::min(y0, b);
      y1 = std::max(y1, b);
    }
  }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double v) { return H - bottom - (v - y0) / (y1 - y0) * (H - top - bottom); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape_xml(title)
    << "</text>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << escape_xml(x_label) << "</text>\n";
  s << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
    << H / 2 << ")\">" << escape_xml(y_label) << "</text>\n";
  for (const auto& [v, anchor, xx, yy] :
       {std::tuple{x0, "start", left, H - bottom + 16}, std::tuple{x1, "end", W - right, H - bottom + 16}}) {
    s << "<text x=\"" << xx << "\" y=\"" << yy << "\" text-anchor=\"" << anchor << "\" font-size=\"10\">"
      << format_double(v) << "</text>\n";
  }
  s << "<text x=\"" << left - 4 << "\" y=\"" << H - bottom << "\" text-anchor=\"end\" font-size=\"10\">"
    << format_double(y0) << "</text>\n";
  s << "<text x=\"" << left - 4 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\" font-size=\"10\">"
    << format_double(y1) << "</text>\n";
  s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s << ' ';
    s << format_double(px(pts[i].first)) << ',' << format_double(py(pts[i].second));
  }
  s << "\"/>\n</svg>\n";
  return s.str();
}

}  // namespace chbreak::cli
