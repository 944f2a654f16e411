#include "chbreak/particles.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace chbreak {

namespace {

constexpr std::size_t kStencil = 4;
constexpr std::size_t kGauss = 4;

struct CellRule {
  std::array<double, kGauss> node{};
  std::array<double, kGauss> weight{};
  // basis[o][g][k]: cubic Lagrange basis k on local nodes 0..3 at o + node[g].
  std::array<std::array<std::array<double, kStencil>, kGauss>, kStencil - 1> basis{};
};

const CellRule& cell_rule() {
  static const CellRule rule = [] {
    CellRule r;
    using G = boost::math::quadrature::gauss<double, kGauss>;
    const auto& abs = G::abscissa();
    const auto& wts = G::weights();
    // Boost stores the non-negative half of the symmetric rule on [-1, 1].
    std::size_t g = 0;
    for (std::size_t i = 0; i < abs.size(); ++i) {
      r.node[g] = 0.5 * (1.0 - abs[i]);
      r.weight[g++] = 0.5 * wts[i];
      if (abs[i] != 0.0) {
        r.node[g] = 0.5 * (1.0 + abs[i]);
        r.weight[g++] = 0.5 * wts[i];
      }
    }
    for (std::size_t o = 0; o + 1 < kStencil; ++o) {
      for (std::size_t gi = 0; gi < kGauss; ++gi) {
        const double s = static_cast<double>(o) + r.node[gi];
        for (std::size_t k = 0; k < kStencil; ++k) {
          double b = 1.0;
          for (std::size_t m = 0; m < kStencil; ++m) {
            if (m != k) b *= (s - static_cast<double>(m)) / (static_cast<double>(k) - static_cast<double>(m));
          }
          r.basis[o][gi][k] = b;
        }
      }
    }
    return r;
  }();
  return rule;
}

// A_0 = 0, A_i = e^{-(q_i - q_{i-1})} A_{i-1} + 1/2 int_{cell} e^{-(q_i - q(eta))} g(eta) d eta,
// with q and g interpolated by cubics in the label.
std::vector<double> left_sweep(std::span<const double> q, std::span<const double> g, double h) {
  const CellRule& rule = cell_rule();
  const std::size_t n = q.size();
  std::vector<double> a(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t left = i - 1;
    const std::size_t start =
        static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(left) - 1, 0,
                                                            static_cast<std::ptrdiff_t>(n - kStencil)));
    const std::size_t o = left - start;
    double cell = 0.0;
    for (std::size_t gi = 0; gi < kGauss; ++gi) {
      const auto& b = rule.basis[o][gi];
      double qg = 0.0, gg = 0.0;
      for (std::size_t k = 0; k < kStencil; ++k) {
        qg += b[k] * q[start + k];
        gg += b[k] * g[start + k];
      }
      cell += rule.weight[gi] * std::exp(-(q[i] - qg)) * gg;
    }
    a[i] = std::exp(-(q[i] - q[i - 1])) * a[i - 1] + 0.5 * h * cell;
  }
  return a;
}

}  // namespace

bool ParticleState::is_finite() const {
  auto fin = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return fin(q) && fin(u) && fin(ux) && fin(jac);
}

ParticleState make_particle_state(const Field& u0) {
  require_finite(u0, "make_particle_state");
  const Field ux0 = deriv(u0);
  ParticleState s;
  const std::size_t n = u0.size();
  s.label_spacing = u0.grid().dx();
  s.label.resize(n);
  for (std::size_t j = 0; j < n; ++j) s.label[j] = u0.grid().x(j);
  s.q = s.label;
  s.u.assign(u0.values().begin(), u0.values().end());
  s.ux.assign(ux0.values().begin(), ux0.values().end());
  s.jac.assign(n, 1.0);
  return s;
}

ParticleConvolution particle_convolutions(const ParticleState& s, std::span<const double> f) {
  const std::size_t n = s.size();
  if (f.size() != n) throw PreconditionError("particle_convolutions: density size mismatch");
  if (n < kStencil) throw PreconditionError("particle_convolutions: too few particles");
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = f[j] * s.jac[j];

  ParticleConvolution out;
  out.plus = left_sweep(s.q, g, s.label_spacing);

  // P- is P+ of the mirrored configuration.
  std::vector<double> q_m(n), g_m(n);
  for (std::size_t j = 0; j < n; ++j) {
    q_m[j] = -s.q[n - 1 - j];
    g_m[j] = g[n - 1 - j];
  }
  auto minus = left_sweep(q_m, g_m, s.label_spacing);
  std::reverse(minus.begin(), minus.end());
  out.minus = std::move(minus);
  return out;
}

ParticleRates particle_rhs(const ParticleState& s, double lambda) {
  const std::size_t n = s.size();
  std::vector<double> density(n);
  for (std::size_t j = 0; j < n; ++j) density[j] = s.u[j] * s.u[j] + 0.5 * s.ux[j] * s.ux[j] + h_value(s.u[j]);
  const auto conv = particle_convolutions(s, density);

  ParticleRates r;
  r.q = s.u;
  r.u.resize(n);
  r.ux.resize(n);
  r.jac.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = s.u[j], ux = s.ux[j];
    r.u[j] = conv.plus[j] - conv.minus[j] - lambda * u;
    r.ux[j] = -0.5 * ux * ux - (conv.plus[j] + conv.minus[j]) + u * u + h_value(u) - lambda * ux;
    r.jac[j] = ux * s.jac[j];
    if (!std::isfinite(r.u[j]) || !std::isfinite(r.ux[j]) || !std::isfinite(r.jac[j])) {
      throw NumericalError("particle_rhs: non-finite rate");
    }
  }
  return r;
}

double particle_energy(const ParticleState& s) {
  double e = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) e += (s.u[j] * s.u[j] + s.ux[j] * s.ux[j]) * s.jac[j];
  return e * s.label_spacing;
}

std::size_t particle_argmin_slope(const ParticleState& s) {
  return static_cast<std::size_t>(std::min_element(s.ux.begin(), s.ux.end()) - s.ux.begin());
}

bool particle_edges_decayed(const ParticleState& s, double tol) {
  double peak = 0.0;
  for (double v : s.u) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return true;
  return std::abs(s.u.front()) < tol * peak && std::abs(s.u.back()) < tol * peak;
}

}  // namespace chbreak
