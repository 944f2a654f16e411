#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "chbreak/characteristics.hpp"
#include "chbreak/diagnostics.hpp"
#include "chbreak/grid.hpp"
#include "chbreak/model.hpp"
#include "chbreak/particles.hpp"

namespace chbreak {

/// spectral: Fourier pseudospectral in x, RK4 in t.
/// lagrangian: RK4 on the particle system of particles.hpp; resolves the
/// slope down to m_stop because the gradient blow-up lives in one ODE per
/// particle rather than in a shrinking spatial layer.
enum class Scheme { spectral, lagrangian };

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

struct SolverConfig {
  double half_length = 30.0;
  std::size_t n_points = 1024;
  InitialDatum datum;
  DissipationProfile profile;
  double t_end = 1.0;
  double cfl_factor = 0.3;
  /// dt <= c_m / |m|
  double slope_dt_factor = 0.2;
  double dt_min = 1e-12;
  double m_stop = -1e6;
  std::size_t record_stride = 1;
  Scheme scheme = Scheme::spectral;
  /// Spectral runs stop with resolution_lost once the H1 share of the modes
  /// N/4 < j <= N/3 exceeds this.
  double resolution_tol = 1e-10;
  /// Characteristic seeds x1.
  std::vector<double> seeds;

  /// Throws PreconditionError on an invalid combination.
  void validate() const;
};

struct SolverState {
  double t = 0.0;
  Field u;
  double dt_last = 0.0;
  std::size_t step_count = 0;
};

enum class OutcomeKind { reached_horizon, breaking_detected, dt_underflow, edge_decay_lost, resolution_lost };

std::string_view to_string(OutcomeKind k);

struct RunOutcome {
  OutcomeKind kind = OutcomeKind::reached_horizon;
  double t_final = 0.0;
  std::vector<DiagnosticsRecord> records;
  std::vector<CharacteristicTrack> tracks;
  /// Set on particle runs: the characteristic label that reached m_stop.
  std::optional<double> breaking_label;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
};

/// Observers called after each emitted record with the state it describes.
struct RunHooks {
  std::function<void(const DiagnosticsRecord&, const SolverState&)> on_spectral_state;
  std::function<void(const DiagnosticsRecord&, const ParticleState&)> on_particle_state;
};

SolverState initial_state(const SolverConfig& cfg);
DiagnosticsRecord make_record(const SolverState& s, const DissipationProfile& profile);
DiagnosticsRecord make_record(const ParticleState& s, const DissipationProfile& profile);

/// Step size for the current state, before any rejection halving.
double choose_dt(const SolverState& s, const SolverConfig& cfg);
double choose_dt(const ParticleState& s, const SolverConfig& cfg);

/// One RK4 step. A non-finite stage halves dt and retries; dt below dt_min
/// throws NumericalError. `rejected` (if given) counts the halvings.
SolverState step(const SolverState& s, const SolverConfig& cfg, std::size_t* rejected = nullptr);
ParticleState step(const ParticleState& s, const SolverConfig& cfg, std::size_t* rejected = nullptr);

/// H1 share of the modes N/4 < j <= N/3.
double spectral_tail_fraction(const Field& u);

/// Integrates to t_end or an abnormal stop. Invalid configurations throw
/// PreconditionError; every other termination is encoded in the outcome.
RunOutcome run(const SolverConfig& cfg, const RunHooks& hooks = {});

}  // namespace chbreak
