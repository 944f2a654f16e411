#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "chbreak/errors.hpp"

namespace chbreak {

/// Relative amplitude a field may keep at the two domain edges before the
/// truncation of the real line to [-L, L) is considered uncontrolled.
inline constexpr double kEdgeTolerance = 1e-8;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/**
 * Uniform periodic grid on [-L, L) with N = 2^p points.
 *
 * Owns the FFTW plans for its size. Plans are created with FFTW_ESTIMATE
 * and FFTW_UNALIGNED so that transforms are deterministic and can run on
 * caller-owned buffers from any thread.
 */
class Grid {
 public:
  static GridPtr make(double half_length, std::size_t n_points);

  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  double half_length() const { return half_length_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  double length() const { return 2.0 * half_length_; }
  double x(std::size_t j) const { return -half_length_ + static_cast<double>(j) * dx_; }

  /// Number of non-negative modes held by a real transform (N/2 + 1).
  std::size_t spectrum_size() const { return n_ / 2 + 1; }
  /// Non-negative wavenumbers k_j = pi j / L, j = 0..N/2.
  std::span<const double> wavenumbers() const { return k_; }

  /// Unnormalized forward real-to-complex transform.
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// Inverse transform including the 1/N normalization.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

  /// Wraps x into [-L, L).
  double wrap(double x) const;

  bool same_as(const Grid& other) const {
    return n_ == other.n_ && half_length_ == other.half_length_;
  }

 private:
  Grid(double half_length, std::size_t n_points);

  double half_length_;
  std::size_t n_;
  double dx_;
  std::vector<double> k_;
  void* plan_forward_ = nullptr;
  void* plan_inverse_ = nullptr;
};

/// Real samples of a function on a Grid.
class Field {
 public:
  explicit Field(GridPtr grid);
  Field(GridPtr grid, std::vector<double> values);

  template <typename F>
  static Field sample(GridPtr grid, F&& f) {
    std::vector<double> v(grid->size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid->x(j));
    return Field(std::move(grid), std::move(v));
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  double& operator[](std::size_t j) { return values_[j]; }

  bool is_finite() const;
  double max_abs() const;
  /// True when both edge samples are below kEdgeTolerance * max|f|.
  bool edges_decayed(double tol = kEdgeTolerance) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

 private:
  void check_compatible(const Field& other) const;

  GridPtr grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Field a, double s);
Field operator*(double s, Field a);
/// Pointwise product (no dealiasing).
Field operator*(const Field& a, const Field& b);

/// Throws NumericalError when f holds NaN or Inf.
void require_finite(const Field& f, const char* where);

/// Spectral first derivative. The Nyquist mode is dropped.
Field deriv(const Field& f);
/// Spectral second derivative.
Field second_deriv(const Field& f);
/// (1 - d^2/dx^2)^{-1} f, i.e. the periodic image of P * f with P = exp(-|x|)/2.
Field helmholtz_inverse(const Field& f);
/// Zeroes every mode with |j| > N/3 (the 2/3 rule).
Field dealias(const Field& f);
/// Pointwise product followed by the 2/3-rule truncation.
Field dealiased_product(const Field& a, const Field& b);

/// One-sided convolutions on the truncated line,
///   P+ * f(x) = 1/2 e^{-x} int_{-inf}^{x} e^{y} f(y) dy,
///   P- * f(x) = 1/2 e^{x}  int_{x}^{inf}  e^{-y} f(y) dy.
/// Evaluated by product integration against a sixth-order local interpolant.
/// Throws PreconditionError if f has not decayed at the domain edges.
Field conv_P_plus(const Field& f);
Field conv_P_minus(const Field& f);

/// Trigonometric interpolant of a field, evaluable anywhere.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const Field& f);
  double operator()(double x) const;

 private:
  GridPtr grid_;
  std::vector<double> nodal_;
  std::vector<std::complex<double>> coeffs_;
};

/// Trigonometric interpolation of f at x (wrapped into [-L, L)). Exact at nodes.
double interp(const Field& f, double x);

/// Rectangle-rule value of int (f^2 + f_x^2) dx with f_x = deriv(f).
double h1_norm_sq(const Field& f);

/// Rectangle-rule integral of f over the period.
double integrate(const Field& f);

}  // namespace chbreak
