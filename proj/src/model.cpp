#include "chbreak/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chbreak {

namespace {

constexpr std::size_t kDenseSamples = 10001;

double sample_max(const DissipationProfile& p, double horizon) {
  double m = p.lambda(0.0);
  if (horizon <= 0.0) return m;
  for (std::size_t i = 1; i < kDenseSamples; ++i) {
    m = std::max(m, p.lambda(horizon * static_cast<double>(i) / (kDenseSamples - 1)));
  }
  return m;
}

double sample_min(const DissipationProfile& p, double horizon) {
  double m = p.lambda(0.0);
  if (horizon <= 0.0) return m;
  for (std::size_t i = 1; i < kDenseSamples; ++i) {
    m = std::min(m, p.lambda(horizon * static_cast<double>(i) / (kDenseSamples - 1)));
  }
  return m;
}

void require_finite_param(double v, const char* name) {
  if (!std::isfinite(v)) throw PreconditionError(std::string("dissipation parameter '") + name + "' is not finite");
}

}  // namespace

// ---------------------------------------------------------------------------
// DissipationProfile

DissipationProfile DissipationProfile::constant(double value, std::optional<double> delta_sup) {
  require_finite_param(value, "value");
  return DissipationProfile(Kind::constant, {value}, delta_sup.value_or(value));
}

DissipationProfile DissipationProfile::linear_ramp(double lambda0, double slope, double delta_sup) {
  require_finite_param(lambda0, "lambda0");
  require_finite_param(slope, "slope");
  return DissipationProfile(Kind::linear_ramp, {lambda0, slope}, delta_sup);
}

DissipationProfile DissipationProfile::sinusoidal(double mean, double amplitude, double omega, double phase,
                                                  std::optional<double> delta_sup) {
  require_finite_param(mean, "mean");
  require_finite_param(amplitude, "amplitude");
  require_finite_param(omega, "omega");
  require_finite_param(phase, "phase");
  if (omega == 0.0) throw PreconditionError("sinusoidal dissipation needs omega != 0");
  return DissipationProfile(Kind::sinusoidal, {mean, amplitude, omega, phase},
                            delta_sup.value_or(mean + std::abs(amplitude)));
}

DissipationProfile DissipationProfile::piecewise_table(std::vector<double> times, std::vector<double> values,
                                                       std::optional<double> delta_sup) {
  if (times.empty() || times.size() != values.size()) {
    throw PreconditionError("piecewise_table needs matching, non-empty times and values");
  }
  if (times.front() != 0.0) throw PreconditionError("piecewise_table times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw PreconditionError("piecewise_table times must be strictly increasing");
  }
  for (double v : values) require_finite_param(v, "values");
  const double bound = delta_sup.value_or(*std::max_element(values.begin(), values.end()));
  DissipationProfile p(Kind::piecewise_table, {}, bound);
  p.table_t_ = std::move(times);
  p.table_v_ = std::move(values);
  return p;
}

double DissipationProfile::lambda(double t) const {
  switch (kind_) {
    case Kind::constant:
      return params_[0];
    case Kind::linear_ramp:
      return params_[0] + params_[1] * t;
    case Kind::sinusoidal:
      return params_[0] + params_[1] * std::sin(params_[2] * t + params_[3]);
    case Kind::piecewise_table: {
      if (t <= table_t_.front()) return table_v_.front();
      if (t >= table_t_.back()) return table_v_.back();
      const auto it = std::upper_bound(table_t_.begin(), table_t_.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - table_t_.begin());
      const double w = (t - table_t_[i - 1]) / (table_t_[i] - table_t_[i - 1]);
      return (1.0 - w) * table_v_[i - 1] + w * table_v_[i];
    }
  }
  return 0.0;
}

double DissipationProfile::integral(double t) const {
  switch (kind_) {
    case Kind::constant:
      return params_[0] * t;
    case Kind::linear_ramp:
      return params_[0] * t + 0.5 * params_[1] * t * t;
    case Kind::sinusoidal: {
      const double mean = params_[0], amp = params_[1], omega = params_[2], phase = params_[3];
      return mean * t + amp / omega * (std::cos(phase) - std::cos(omega * t + phase));
    }
    case Kind::piecewise_table: {
      // Exact for the piecewise-linear interpolant.
      double acc = 0.0;
      double prev_t = 0.0;
      double prev_v = lambda(0.0);
      for (std::size_t i = 1; i < table_t_.size() && table_t_[i] < t; ++i) {
        acc += 0.5 * (prev_v + table_v_[i]) * (table_t_[i] - prev_t);
        prev_t = table_t_[i];
        prev_v = table_v_[i];
      }
      if (t > prev_t) acc += 0.5 * (prev_v + lambda(t)) * (t - prev_t);
      return acc;
    }
  }
  return 0.0;
}

void DissipationProfile::validate(double horizon) const {
  if (!std::isfinite(delta_sup_)) throw PreconditionError("delta_sup must be finite");
  const double m = sample_max(*this, horizon);
  if (delta_sup_ < m - 1e-12 * std::max(1.0, std::abs(m))) {
    throw PreconditionError("delta_sup = " + std::to_string(delta_sup_) +
                            " is below max lambda(t) = " + std::to_string(m) + " on the horizon");
  }
}

bool DissipationProfile::dissipative_on(double horizon) const { return sample_min(*this, horizon) >= 0.0; }

std::string_view to_string(DissipationProfile::Kind kind) {
  switch (kind) {
    case DissipationProfile::Kind::constant: return "constant";
    case DissipationProfile::Kind::linear_ramp: return "linear_ramp";
    case DissipationProfile::Kind::sinusoidal: return "sinusoidal";
    case DissipationProfile::Kind::piecewise_table: return "piecewise_table";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// InitialDatum

InitialDatum InitialDatum::gaussian(double a, double sigma, double x_c) {
  return {Family::gaussian, a, sigma, x_c, {}};
}
InitialDatum InitialDatum::gaussian_derivative(double a, double sigma, double x_c) {
  return {Family::gaussian_derivative, a, sigma, x_c, {}};
}
InitialDatum InitialDatum::sech_squared(double a, double w, double x_c) {
  return {Family::sech_squared, a, w, x_c, {}};
}
InitialDatum InitialDatum::antisym_peak(double a, double sigma, double x_c) {
  return {Family::antisym_peak, a, sigma, x_c, {}};
}
InitialDatum InitialDatum::from_samples(std::vector<double> values) {
  return {Family::samples, 0.0, 1.0, 0.0, std::move(values)};
}

double InitialDatum::value(double x) const {
  const double s = (x - center) / width;
  switch (family) {
    case Family::gaussian:
      return amplitude * std::exp(-0.5 * s * s);
    case Family::gaussian_derivative:
      return -amplitude * (x - center) * std::exp(-0.5 * s * s);
    case Family::sech_squared: {
      const double c = 1.0 / std::cosh(s);
      return amplitude * c * c;
    }
    case Family::antisym_peak:
      return -amplitude * width * std::tanh(s) / std::cosh(s);
    case Family::samples:
      break;
  }
  throw PreconditionError("samples datum has no analytic value");
}

double InitialDatum::slope(double x) const {
  const double s = (x - center) / width;
  switch (family) {
    case Family::gaussian:
      return -amplitude * s / width * std::exp(-0.5 * s * s);
    case Family::gaussian_derivative:
      return -amplitude * (1.0 - s * s) * std::exp(-0.5 * s * s);
    case Family::sech_squared: {
      const double c = 1.0 / std::cosh(s);
      return -2.0 * amplitude / width * c * c * std::tanh(s);
    }
    case Family::antisym_peak: {
      const double c = 1.0 / std::cosh(s);
      const double th = std::tanh(s);
      return -amplitude * c * (c * c - th * th);
    }
    case Family::samples:
      break;
  }
  throw PreconditionError("samples datum has no analytic slope");
}

std::optional<SlopePoint> InitialDatum::designated_slope() const {
  if (amplitude == 0.0) return std::nullopt;
  const double sign = amplitude > 0.0 ? 1.0 : -1.0;
  switch (family) {
    case Family::gaussian: {
      const double x = center + sign * width;
      return SlopePoint{x, slope(x)};
    }
    case Family::gaussian_derivative: {
      const double x = amplitude > 0.0 ? center : center - std::sqrt(3.0) * width;
      return SlopePoint{x, slope(x)};
    }
    case Family::sech_squared: {
      const double x = center + sign * width * std::atanh(1.0 / std::sqrt(3.0));
      return SlopePoint{x, slope(x)};
    }
    case Family::antisym_peak:
      if (amplitude > 0.0) return SlopePoint{center, -amplitude};
      return std::nullopt;
    case Family::samples:
      break;
  }
  return std::nullopt;
}

std::string_view to_string(InitialDatum::Family family) {
  switch (family) {
    case InitialDatum::Family::gaussian: return "gaussian";
    case InitialDatum::Family::gaussian_derivative: return "gaussian_derivative";
    case InitialDatum::Family::sech_squared: return "sech_squared";
    case InitialDatum::Family::antisym_peak: return "antisym_peak";
    case InitialDatum::Family::samples: return "samples";
  }
  return "unknown";
}

std::optional<InitialDatum::Family> parse_family(std::string_view name) {
  for (auto f : {InitialDatum::Family::gaussian, InitialDatum::Family::gaussian_derivative,
                 InitialDatum::Family::sech_squared, InitialDatum::Family::antisym_peak,
                 InitialDatum::Family::samples}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Equation

double h_value(double u) { return u * u * u - 1.5 * u * u; }

Field h_eval(const Field& u) {
  Field r(u.grid_ptr());
  for (std::size_t j = 0; j < u.size(); ++j) r[j] = h_value(u[j]);
  return r;
}

namespace {

// u^2 + u_x^2 / 2 + h(u), dealiased.
Field nonlocal_density(const Field& u, const Field& ux) {
  Field f(u.grid_ptr());
  for (std::size_t j = 0; j < u.size(); ++j) f[j] = u[j] * u[j] + 0.5 * ux[j] * ux[j] + h_value(u[j]);
  return dealias(f);
}

void require_breakdown_free(const Field& f, const char* where) {
  if (!f.is_finite()) throw NumericalError(std::string(where) + ": non-finite intermediate");
}

}  // namespace

Field rhs(const Field& u, double t, const DissipationProfile& profile) {
  require_finite(u, "rhs");
  const Field ux = deriv(u);
  const Field flux = deriv(helmholtz_inverse(nonlocal_density(u, ux)));
  const Field advection = dealiased_product(u, ux);
  const double lam = profile.lambda(t);
  Field r(u.grid_ptr());
  for (std::size_t j = 0; j < u.size(); ++j) r[j] = -advection[j] - flux[j] - lam * u[j];
  require_breakdown_free(r, "rhs");
  return r;
}

Field slope_rhs(const Field& u, double t, const DissipationProfile& profile) {
  require_finite(u, "slope_rhs");
  const Field ux = deriv(u);
  const Field uxx = second_deriv(u);
  const Field density = nonlocal_density(u, ux);
  const Field smoothed = helmholtz_inverse(density);
  const Field u_uxx = dealiased_product(u, uxx);
  const double lam = profile.lambda(t);
  Field local(u.grid_ptr());
  for (std::size_t j = 0; j < u.size(); ++j) local[j] = -0.5 * ux[j] * ux[j] + u[j] * u[j] + h_value(u[j]);
  local = dealias(local);
  Field r(u.grid_ptr());
  for (std::size_t j = 0; j < u.size(); ++j) r[j] = local[j] - u_uxx[j] - smoothed[j] - lam * ux[j];
  require_breakdown_free(r, "slope_rhs");
  return r;
}

Field make_datum(const InitialDatum& datum, const GridPtr& grid) {
  Field u(grid);
  if (datum.family == InitialDatum::Family::samples) {
    u = Field(grid, datum.samples);
  } else {
    if (!(datum.width > 0.0) || !std::isfinite(datum.width)) {
      throw PreconditionError("datum width must be positive");
    }
    if (!std::isfinite(datum.amplitude) || !std::isfinite(datum.center)) {
      throw PreconditionError("datum amplitude and center must be finite");
    }
    u = Field::sample(grid, [&](double x) { return datum.value(x); });
  }
  if (!u.is_finite()) throw PreconditionError("datum has non-finite samples");
  if (!u.edges_decayed()) {
    throw PreconditionError(std::string("datum ") + std::string(to_string(datum.family)) +
                            " does not decay below the edge tolerance on [-L, L); enlarge L");
  }
  return u;
}

}  // namespace chbreak
