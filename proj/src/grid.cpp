#include "chbreak/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

namespace chbreak {

namespace {

// FFTW planning and plan destruction are not thread-safe.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

using cplx = std::complex<double>;

std::vector<cplx> spectrum_of(const Field& f) {
  std::vector<cplx> out(f.grid().spectrum_size());
  f.grid().forward(f.values(), out);
  return out;
}

Field from_spectrum(const GridPtr& grid, std::vector<cplx> spec) {
  std::vector<double> v(grid->size());
  grid->inverse(spec, v);
  return Field(grid, std::move(v));
}

// Lagrange basis polynomial k on the nodes 0..P-1 evaluated at s.
template <std::size_t P>
double lagrange_basis(std::size_t k, double s) {
  double r = 1.0;
  for (std::size_t m = 0; m < P; ++m) {
    if (m == k) continue;
    r *= (s - static_cast<double>(m)) / (static_cast<double>(k) - static_cast<double>(m));
  }
  return r;
}

constexpr std::size_t kStencil = 6;

// W[o][k] = dx * int_0^1 exp(-dx (1 - t)) l_k(o + t) dt for the cell between
// local nodes o and o + 1 of a six-point stencil.
std::array<std::array<double, kStencil>, kStencil - 1> cell_weights(double dx) {
  std::array<std::array<double, kStencil>, kStencil - 1> w{};
  using boost::math::quadrature::gauss;
  for (std::size_t o = 0; o + 1 < kStencil; ++o) {
    for (std::size_t k = 0; k < kStencil; ++k) {
      auto integrand = [&](double t) {
        return std::exp(-dx * (1.0 - t)) * lagrange_basis<kStencil>(k, static_cast<double>(o) + t);
      };
      w[o][k] = dx * gauss<double, 20>::integrate(integrand, 0.0, 1.0);
    }
  }
  return w;
}

// Cumulative P+ sweep on uniform samples: A_0 = 0 (edge treated as -inf),
// A_i = e^{-dx} A_{i-1} + 1/2 int_{x_{i-1}}^{x_i} e^{-(x_i - y)} f(y) dy.
std::vector<double> left_sweep(std::span<const double> f, double dx) {
  const std::size_t n = f.size();
  const auto w = cell_weights(dx);
  const double decay = std::exp(-dx);
  std::vector<double> a(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t left = i - 1;
    const std::size_t start = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(left) - 2, 0,
                                                         static_cast<std::ptrdiff_t>(n - kStencil));
    const std::size_t o = left - start;
    double cell = 0.0;
    for (std::size_t k = 0; k < kStencil; ++k) cell += w[o][k] * f[start + k];
    a[i] = decay * a[i - 1] + 0.5 * cell;
  }
  return a;
}

void require_edge_decay(const Field& f, const char* where) {
  require_finite(f, where);
  if (!f.edges_decayed()) {
    throw PreconditionError(std::string(where) +
                            ": field has not decayed at the domain edges; truncation error uncontrolled");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid

GridPtr Grid::make(double half_length, std::size_t n_points) {
  if (!(half_length > 0.0) || !std::isfinite(half_length)) {
    throw PreconditionError("grid half_length must be positive and finite");
  }
  if (n_points < 16 || !std::has_single_bit(n_points)) {
    throw PreconditionError("grid n_points must be a power of two and at least 16, got " +
                            std::to_string(n_points));
  }
  return GridPtr(new Grid(half_length, n_points));
}

Grid::Grid(double half_length, std::size_t n_points)
    : half_length_(half_length), n_(n_points), dx_(2.0 * half_length / static_cast<double>(n_points)) {
  k_.resize(spectrum_size());
  for (std::size_t j = 0; j < k_.size(); ++j) k_[j] = std::numbers::pi * static_cast<double>(j) / half_length_;

  std::lock_guard lock(fftw_planner_mutex());
  double* re = fftw_alloc_real(n_);
  fftw_complex* co = fftw_alloc_complex(spectrum_size());
  const int n = static_cast<int>(n_);
  plan_forward_ = fftw_plan_dft_r2c_1d(n, re, co, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_inverse_ = fftw_plan_dft_c2r_1d(n, co, re, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(re);
  fftw_free(co);
}

Grid::~Grid() {
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
}

void Grid::forward(std::span<const double> in, std::span<cplx> out) const {
  // r2c does not modify its input.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_forward_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void Grid::inverse(std::span<const cplx> in, std::span<double> out) const {
  // c2r destroys its input.
  std::vector<cplx> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inverse_), reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(n_);
  for (double& v : out) v *= scale;
}

double Grid::wrap(double x) const {
  const double period = length();
  double y = std::fmod(x + half_length_, period);
  if (y < 0.0) y += period;
  if (y >= period) y -= period;
  return y - half_length_;
}

// ---------------------------------------------------------------------------
// Field

Field::Field(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

Field::Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) {
    throw PreconditionError("field has " + std::to_string(values_.size()) + " samples, grid has " +
                            std::to_string(grid_->size()));
  }
}

bool Field::is_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::edges_decayed(double tol) const {
  const double peak = max_abs();
  if (peak == 0.0) return true;
  return std::abs(values_.front()) < tol * peak && std::abs(values_.back()) < tol * peak;
}

void Field::check_compatible(const Field& other) const {
  if (!grid_->same_as(*other.grid_)) throw PreconditionError("field arithmetic across different grids");
}

Field& Field::operator+=(const Field& other) {
  check_compatible(other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  check_compatible(other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Field a, double s) { return a *= s; }
Field operator*(double s, Field a) { return a *= s; }

Field operator*(const Field& a, const Field& b) {
  if (!a.grid().same_as(b.grid())) throw PreconditionError("field product across different grids");
  Field r(a.grid_ptr());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = a[j] * b[j];
  return r;
}

void require_finite(const Field& f, const char* where) {
  if (!f.is_finite()) throw NumericalError(std::string(where) + ": non-finite input");
}

// ---------------------------------------------------------------------------
// Spectral operators

Field deriv(const Field& f) {
  require_finite(f, "deriv");
  auto spec = spectrum_of(f);
  const auto k = f.grid().wavenumbers();
  for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= cplx(0.0, k[j]);
  spec.back() = 0.0;
  return from_spectrum(f.grid_ptr(), std::move(spec));
}

Field second_deriv(const Field& f) {
  require_finite(f, "second_deriv");
  auto spec = spectrum_of(f);
  const auto k = f.grid().wavenumbers();
  for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= -k[j] * k[j];
  return from_spectrum(f.grid_ptr(), std::move(spec));
}

Field helmholtz_inverse(const Field& f) {
  require_finite(f, "helmholtz_inverse");
  auto spec = spectrum_of(f);
  const auto k = f.grid().wavenumbers();
  for (std::size_t j = 0; j < spec.size(); ++j) spec[j] /= 1.0 + k[j] * k[j];
  return from_spectrum(f.grid_ptr(), std::move(spec));
}

Field dealias(const Field& f) {
  auto spec = spectrum_of(f);
  const std::size_t cutoff = f.size() / 3;
  for (std::size_t j = cutoff + 1; j < spec.size(); ++j) spec[j] = 0.0;
  return from_spectrum(f.grid_ptr(), std::move(spec));
}

Field dealiased_product(const Field& a, const Field& b) { return dealias(a * b); }

Field conv_P_plus(const Field& f) {
  require_edge_decay(f, "conv_P_plus");
  if (f.max_abs() == 0.0) return Field(f.grid_ptr());
  return Field(f.grid_ptr(), left_sweep(f.values(), f.grid().dx()));
}

Field conv_P_minus(const Field& f) {
  require_edge_decay(f, "conv_P_minus");
  if (f.max_abs() == 0.0) return Field(f.grid_ptr());
  std::vector<double> reversed(f.values().rbegin(), f.values().rend());
  auto swept = left_sweep(reversed, f.grid().dx());
  std::reverse(swept.begin(), swept.end());
  return Field(f.grid_ptr(), std::move(swept));
}

// ---------------------------------------------------------------------------
// Interpolation and norms

TrigInterpolant::TrigInterpolant(const Field& f)
    : grid_(f.grid_ptr()), nodal_(f.values().begin(), f.values().end()) {
  require_finite(f, "interp");
  coeffs_ = spectrum_of(f);
  const double n = static_cast<double>(f.size());
  for (std::size_t j = 0; j < coeffs_.size(); ++j) {
    const bool edge = (j == 0 || j + 1 == coeffs_.size());
    coeffs_[j] *= (edge ? 1.0 : 2.0) / n;
  }
}

double TrigInterpolant::operator()(double x) const {
  const Grid& g = *grid_;
  const double xw = g.wrap(x);
  const double s = (xw + g.half_length()) / g.dx();
  const double nearest = std::round(s);
  if (std::abs(s - nearest) < 1e-12) {
    return nodal_[static_cast<std::size_t>(nearest) % nodal_.size()];
  }
  const double theta = std::numbers::pi * (xw + g.half_length()) / g.half_length();
  double sum = 0.0;
  // Direct evaluation; the rotation recurrence drifts for large N.
  for (std::size_t j = 0; j < coeffs_.size(); ++j) {
    const double phase = theta * static_cast<double>(j);
    sum += coeffs_[j].real() * std::cos(phase) - coeffs_[j].imag() * std::sin(phase);
  }
  return sum;
}

double interp(const Field& f, double x) { return TrigInterpolant(f)(x); }

double h1_norm_sq(const Field& f) {
  const Field fx = deriv(f);
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * f[j] + fx[j] * fx[j];
  return s * f.grid().dx();
}

double integrate(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().dx();
}

}  // namespace chbreak
