#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chbreak/grid.hpp"
#include "chbreak/model.hpp"

namespace chbreak {

/**
 * Characteristic (Lagrangian) form of the equation.
 *
 * Each particle carries its label xi (its position at t = 0), its current
 * position q, the values u = u(t, q) and ux = u_x(t, q), and the Jacobian
 * jac = dq/dxi. Along a particle
 *
 *   q'   = u
 *   u'   = P+ * F - P- * F - lambda u
 *   ux'  = -ux^2/2 - (P+ * F + P- * F) + u^2 + h(u) - lambda ux
 *   jac' = ux jac
 *
 * with F = u^2 + ux^2/2 + h(u). The convolutions are integrals over labels
 * with density F jac, which stays bounded while ux -> -inf, so the slope
 * singularity is carried by a single ODE per particle instead of being
 * resolved in space.
 */
struct ParticleState {
  double t = 0.0;
  double label_spacing = 0.0;
  std::vector<double> label;
  std::vector<double> q;
  std::vector<double> u;
  std::vector<double> ux;
  std::vector<double> jac;
  double dt_last = 0.0;
  std::size_t step_count = 0;

  std::size_t size() const { return label.size(); }
  bool is_finite() const;
};

/// Particles at the grid nodes of u0, with ux from the spectral derivative.
ParticleState make_particle_state(const Field& u0);

struct ParticleConvolution {
  std::vector<double> plus;
  std::vector<double> minus;
};

/// P+ * f and P- * f at every particle position, for a density f given at
/// the particles (Eulerian values, not yet multiplied by jac). Fourth-order
/// product integration over the label cells; the outermost particles are
/// treated as -inf / +inf.
ParticleConvolution particle_convolutions(const ParticleState& s, std::span<const double> f);

struct ParticleRates {
  std::vector<double> q;
  std::vector<double> u;
  std::vector<double> ux;
  std::vector<double> jac;
};

/// Right-hand side of the characteristic system. Throws NumericalError on
/// non-finite rates.
ParticleRates particle_rhs(const ParticleState& s, double lambda);

/// int (u^2 + u_x^2) dx = int (u^2 + ux^2) jac d xi, rectangle rule in labels.
double particle_energy(const ParticleState& s);

/// Index of the most negative ux (smallest label on ties).
std::size_t particle_argmin_slope(const ParticleState& s);

/// True when |u| at both end particles is below tol * max|u|.
bool particle_edges_decayed(const ParticleState& s, double tol = kEdgeTolerance);

}  // namespace chbreak
