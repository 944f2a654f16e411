#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "chbreak/grid.hpp"
#include "chbreak/model.hpp"
#include "chbreak/particles.hpp"

namespace chbreak {

struct SolverState;

/// |u_x| along a track beyond which samples are flagged unreliable.
inline constexpr double kTrackReliableSlope = 1e5;

/// Quantities along q(t, x1). phi = u - u_x, psi = u + u_x,
/// g = sqrt(-phi psi) (NaN where phi psi >= 0).
struct TrackSample {
  double t = 0.0;
  double q = 0.0;
  double u = 0.0;
  double ux = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  double g = 0.0;
  bool unreliable = false;
};

TrackSample make_track_sample(double t, double q, double u, double ux);

/**
 * Particle path from a seed x1.
 *
 * On spectral runs the path is integrated with Heun's method on the
 * trigonometric interpolant of u, in lockstep with the solver. On particle
 * runs the track follows the particle whose label is closest to the seed.
 */
class CharacteristicTrack {
 public:
  /// Track on a spectral run, starting from the state at t = 0.
  static CharacteristicTrack start(double seed, const SolverState& initial);
  /// Track on a particle run; the seed snaps to the nearest label.
  static CharacteristicTrack start(double seed, const ParticleState& initial);

  double seed() const { return seed_; }
  const std::vector<TrackSample>& samples() const { return samples_; }
  bool edge_contaminated() const { return edge_contaminated_; }
  /// Particle index on particle runs.
  std::optional<std::size_t> particle() const { return particle_; }

  /// Heun step of q' = u(t, q) from `before` to `after`; appends a sample.
  void advance(const SolverState& before, const SolverState& after);
  /// Appends the tracked particle's current values.
  void advance(const ParticleState& after);

 private:
  void push(TrackSample s, double half_length, double dx);

  double seed_ = 0.0;
  std::vector<TrackSample> samples_;
  bool edge_contaminated_ = false;
  std::optional<std::size_t> particle_;
};

struct LemmaResidual {
  double r_u = 0.0;
  double r_ux = 0.0;
};

/// Residuals of the characteristic dynamics at the sample whose time equals
/// state.t, using three-point differences in t of u(q) and u_x(q) against
///   u'   = P+*F - P-*F - lambda u,
///   u_x' = -u_x^2/2 - P+*F - P-*F + u^2 + h(u) - lambda u_x,
/// F = u^2 + u_x^2/2 + h(u), with P+- by line quadrature. nullopt when the
/// sample has no neighbour on either side.
std::optional<LemmaResidual> lemma_residual(const CharacteristicTrack& track, const SolverState& state,
                                            const DissipationProfile& profile);

/// Same residuals with the right sides taken from rhs + u u_x and
/// slope_rhs + u u_xx on the grid, then interpolated to q.
std::optional<LemmaResidual> direct_form_residual(const CharacteristicTrack& track, const SolverState& state,
                                                  const DissipationProfile& profile);

/// exp(int_0^t u_x(tau, q(tau)) d tau) by the trapezoid rule over the samples.
double diffeo_factor(const CharacteristicTrack& track);

}  // namespace chbreak
