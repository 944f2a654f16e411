#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "chbreak/criteria.hpp"
#include "chbreak/datum_search.hpp"
#include "chbreak/solver.hpp"
#include "oracles.hpp"

using namespace chbreak;

namespace {

Field unit_energy_gaussian(const GridPtr& g) {
  Field u = make_datum(InitialDatum::gaussian(1.0, 1.0), g);
  const double c = 1.0 / std::sqrt(h1_norm_sq(u));
  for (std::size_t j = 0; j < u.size(); ++j) u[j] *= c;
  return u;
}

}  // namespace

TEST(ComputeK, ClosedFormValues) {
  EXPECT_EQ(compute_K(0.0), 0.0);
  EXPECT_NEAR(compute_K(1.0), 3.2071, 5e-5);
  EXPECT_DOUBLE_EQ(compute_K(1.0), std::sqrt(2.0) / 2.0 + 2.5);
  EXPECT_NEAR(compute_K(4.0), 15.6569, 5e-5);
}

TEST(ComputeK, FieldUsesH1Energy) {
  const auto g = Grid::make(20.0, 512);
  EXPECT_EQ(compute_K(Field(g)), 0.0);
  const Field u = make_datum(InitialDatum::gaussian(1.3, 0.9), g);
  EXPECT_DOUBLE_EQ(compute_K(u), compute_K(h1_norm_sq(u)));
  EXPECT_GT(compute_K(u), 0.0);
}

TEST(Criterion1, ThresholdForUnitEnergy) {
  const auto g = Grid::make(20.0, 512);
  const CriterionReport r = check_criterion1(unit_energy_gaussian(g), 0.0);
  EXPECT_NEAR(r.E0, 1.0, 1e-14);
  EXPECT_NEAR(r.threshold_slope, -2.5327, 1e-4);
  EXPECT_NEAR(r.threshold_slope, -std::sqrt(std::sqrt(2.0) + 5.0), 1e-13);
  EXPECT_FALSE(r.criterion1_satisfied);
  EXPECT_FALSE(r.T1_bound);
}

TEST(Criterion1, ZeroDatumNotSatisfied) {
  const auto g = Grid::make(10.0, 64);
  const CriterionReport r = check_criterion1(Field(g), 0.0);
  EXPECT_EQ(r.K, 0.0);
  EXPECT_EQ(r.threshold_slope, 0.0);
  EXPECT_FALSE(r.criterion1_satisfied);
  const CriterionReport r2 = check_criterion2(Field(g), 0.0, 0.0);
  EXPECT_FALSE(r2.criterion2_satisfied);
  EXPECT_FALSE(r2.g0);
  EXPECT_FALSE(r2.location_interval);
}

TEST(Criterion1, SteepDatumSatisfiedWithBound) {
  const auto g = Grid::make(10.0, 4096);
  const auto d = InitialDatum::gaussian_derivative(10.0, 0.05);
  const CriterionReport r = evaluate_criteria(d, g, 0.1);
  ASSERT_TRUE(r.criterion1_satisfied);
  EXPECT_TRUE(r.slope_analytic);
  EXPECT_EQ(r.min_slope, -10.0);
  EXPECT_EQ(r.x0, 0.0);
  EXPECT_DOUBLE_EQ(r.threshold_slope, -0.1 - std::sqrt(0.01 + 2 * r.K));
  EXPECT_DOUBLE_EQ(r.margin1, (r.threshold_slope - r.min_slope) / std::abs(r.threshold_slope));
  ASSERT_TRUE(r.T1_bound);
  const double s = r.s, a = r.min_slope + 0.1;
  EXPECT_NEAR(*r.T1_bound, std::log((a - s) / (a + s)) / s, 1e-14);
}

TEST(TimeBounds, ClosedFormCases) {
  EXPECT_NEAR(*time_bound_slope(0.0, 0.5, -2.0), std::log(3.0), 1e-15);
  EXPECT_FALSE(time_bound_slope(0.0, 0.5, -1.0));
  EXPECT_FALSE(time_bound_slope(0.0, 0.5, 0.3));
  EXPECT_NEAR(*time_bound_slope(0.0, 0.0, -1.0), 2.0, 1e-15);
  EXPECT_NEAR(*time_bound_mixed(0.0, 0.5, 3.0), std::log(2.0), 1e-15);
  EXPECT_FALSE(time_bound_mixed(0.0, 0.5, 1.0));
  EXPECT_NEAR(*time_bound_mixed(0.0, 0.0, 4.0), 0.5, 1e-15);
}

TEST(TimeBounds, SlopeBoundIsRiccatiBlowUpTime) {
  // omega' = -delta omega - omega^2/2 + K integrated with Boost's adaptive
  // Gauss-Kronrod on dt/d omega = 1/f(omega) from omega0 to -inf.
  for (auto [delta, K, w0] : std::vector<std::tuple<double, double, double>>{
           {0.0, 3.2, -4.0}, {0.3, 1.0, -3.0}, {0.5, 15.0, -8.0}}) {
    const double s = std::sqrt(delta * delta + 2 * K);
    auto inv_rate = [&](double v) {
      const double w = w0 - v / (1.0 - v);  // v in [0, 1) maps to [w0, -inf)
      const double dwdv = 1.0 / ((1.0 - v) * (1.0 - v));
      return dwdv / (delta * w + 0.5 * w * w - K);
    };
    const double ref = oracle::integrate(inv_rate, 0.0, 1.0);
    ASSERT_LT(w0, -delta - s);
    EXPECT_NEAR(*time_bound_slope(delta, K, w0), ref, 1e-9);
  }
}

TEST(Criterion1, ThresholdDecreasesInDeltaAndK) {
  const auto g = Grid::make(20.0, 512);
  const Field u = make_datum(InitialDatum::gaussian_derivative(3.0, 0.4), g);
  double prev = 0.0;
  for (double delta : {0.0, 0.1, 0.5, 1.0, 2.0}) {
    const CriterionReport r = check_criterion1(u, delta);
    if (delta > 0.0) EXPECT_LT(r.threshold_slope, prev);
    prev = r.threshold_slope;
  }
  double prev_k = 0.0;
  for (double a : {1.0, 2.0, 3.0}) {
    const Field v = make_datum(InitialDatum::gaussian(a, 1.0), g);
    const CriterionReport r = check_criterion1(v, 0.2);
    if (a > 1.0) EXPECT_LT(r.threshold_slope, prev_k);
    prev_k = r.threshold_slope;
  }
}

TEST(Criterion2, ImpliesCriterion1OnRandomData) {
  std::mt19937_64 rng(404);
  const auto g = Grid::make(10.0, 4096);
  std::uniform_real_distribution<double> pos(-1.0, 1.0), del(0.0, 0.5), scale(0.05, 0.5);
  int satisfied = 0;
  for (int trial = 0; trial < 200; ++trial) {
    oracle::RandomBumps bumps(rng, 2, 1.0, 0.02, 0.06);
    const double c = scale(rng);
    const Field u = Field::sample(g, [&](double x) { return c * bumps(x); });
    const double x1 = trial % 2 == 0 ? default_x1(u) : pos(rng);
    const CriterionReport r = check_criterion2(u, del(rng), x1);
    if (!r.criterion2_satisfied) continue;
    ++satisfied;
    EXPECT_TRUE(r.criterion1_satisfied);
    EXPECT_LT(r.u0x_x1, r.threshold_slope);
    ASSERT_TRUE(r.g0);
    EXPECT_GT(*r.g0, r.delta + r.s);
    ASSERT_TRUE(r.T2_bound);
    EXPECT_GT(*r.T2_bound, 0.0);
    EXPECT_TRUE(std::isfinite(*r.T2_bound));
  }
  EXPECT_GT(satisfied, 5);
}

TEST(Criterion2, FieldsAndLocationInterval) {
  const auto g = Grid::make(10.0, 4096);
  const auto d = InitialDatum::antisym_peak(10.0, 0.05, 0.5);
  const CriterionReport r = evaluate_criteria(d, g, 0.1, 0.5);
  ASSERT_TRUE(r.criterion2_satisfied);
  EXPECT_EQ(*r.x1, 0.5);
  EXPECT_NEAR(r.u0_x1, 0.0, 1e-12);
  EXPECT_NEAR(r.u0x_x1, -10.0, 1e-8);
  EXPECT_DOUBLE_EQ(r.mixed_threshold, -std::abs(r.u0_x1) - 0.1 - r.s);
  EXPECT_NEAR(*r.g0, std::sqrt(r.u0x_x1 * r.u0x_x1 - r.u0_x1 * r.u0_x1), 1e-14);
  const double s = r.s;
  EXPECT_NEAR(*r.T2_bound, std::log((*r.g0 - 0.1 + s) / (*r.g0 - 0.1 - s)) / s, 1e-14);
  const double half = std::sqrt(2.0) / 2.0 * std::sqrt(r.E0) * *r.T2_bound;
  EXPECT_NEAR(r.location_interval->first, 0.5 - half, 1e-14);
  EXPECT_NEAR(r.location_interval->second, 0.5 + half, 1e-14);
}

TEST(Criterion2, DefaultSeedMinimisesMixedQuantity) {
  const auto g = Grid::make(20.0, 1024);
  const Field u = make_datum(InitialDatum::gaussian(2.0, 0.7, 1.0), g);
  const double x1 = default_x1(u);
  const Field ux = deriv(u);
  double best = 1e300;
  for (std::size_t j = 0; j < u.size(); ++j) best = std::min(best, ux[j] + std::abs(u[j]));
  std::size_t j1 = static_cast<std::size_t>(std::llround((x1 + 20.0) / g->dx()));
  EXPECT_EQ(ux[j1] + std::abs(u[j1]), best);
}

TEST(SlopeBudget, ZeroField) {
  const auto g = Grid::make(10.0, 64);
  const auto p = DissipationProfile::constant(0.5);
  EXPECT_EQ(m_prime_rhs(Field(g), 0.0, p), 0.0);
  const SlopeBudget b = slope_budget(Field(g), 0.0, p);
  EXPECT_EQ(b.forcing, 0.0);
  EXPECT_EQ(b.H, 0.125);
}

TEST(SlopeBudget, TermsAreConsistent) {
  const auto g = Grid::make(30.0, 1024);
  const auto p = DissipationProfile::constant(0.3);
  const Field u = make_datum(InitialDatum::gaussian(1.0, 1.0), g);
  const SlopeBudget b = slope_budget(u, 0.0, p);
  EXPECT_DOUBLE_EQ(b.m_prime, -0.5 * b.m * b.m - 0.3 * b.m + b.forcing);
  EXPECT_DOUBLE_EQ(b.H, b.forcing + 0.5 * 0.09);
  EXPECT_DOUBLE_EQ(b.m_prime, m_prime_rhs(u, 0.0, p));
  EXPECT_NEAR(b.m, interp(deriv(u), b.xi), 1e-15);
  EXPECT_NEAR(b.m, InitialDatum::gaussian(1.0, 1.0).designated_slope()->slope, 1e-10);
  EXPECT_NEAR(b.xi, InitialDatum::gaussian(1.0, 1.0).designated_slope()->x, 1e-7);
}

TEST(SlopeBudget, ParticleAndGridAgreeAtStart) {
  const auto g = Grid::make(30.0, 1024);
  const auto p = DissipationProfile::constant(0.3);
  const Field u = make_datum(InitialDatum::gaussian_derivative(1.5, 0.8), g);
  const SlopeBudget a = slope_budget(u, 0.0, p);
  const SlopeBudget b = slope_budget(make_particle_state(u), p);
  EXPECT_NEAR(a.xi, b.xi, 1e-12);
  EXPECT_NEAR(a.m, b.m, 1e-12);
  // Fourth-order label quadrature against the spectral convolution.
  EXPECT_NEAR(a.forcing, b.forcing, 1e-5);
}

TEST(SlopeBudget, TimeDifferenceOfMinimalSlope) {
  SolverConfig c;
  c.half_length = 30.0;
  c.n_points = 1024;
  c.datum = InitialDatum::gaussian(1.0, 1.0);
  c.profile = DissipationProfile::constant(0.2);
  c.t_end = 0.2;
  c.cfl_factor = 0.05;
  std::vector<SolverState> states;
  RunHooks hooks;
  hooks.on_spectral_state = [&](const DiagnosticsRecord&, const SolverState& s) { states.push_back(s); };
  ASSERT_EQ(run(c, hooks).kind, OutcomeKind::reached_horizon);
  ASSERT_GE(states.size(), 5u);
  for (std::size_t i = 1; i + 1 < states.size(); i += 3) {
    const double m0 = slope_budget(states[i - 1].u, states[i - 1].t, c.profile).m;
    const double m2 = slope_budget(states[i + 1].u, states[i + 1].t, c.profile).m;
    const double fd = (m2 - m0) / (states[i + 1].t - states[i - 1].t);
    EXPECT_NEAR(fd, m_prime_rhs(states[i].u, states[i].t, c.profile), 1e-4) << "t=" << states[i].t;
  }
}

TEST(SlopeBudget, ForcingBoundedAlongRun) {
  SolverConfig c;
  c.half_length = 30.0;
  c.n_points = 1024;
  c.datum = InitialDatum::gaussian(0.5, 1.5);
  c.profile = DissipationProfile::sinusoidal(0.1, 0.2, 2.0);
  c.t_end = 1.0;
  const double K = compute_K(make_datum(c.datum, Grid::make(30.0, 1024)));
  const double delta = c.profile.delta_sup();
  std::size_t checked = 0;
  RunHooks hooks;
  hooks.on_spectral_state = [&](const DiagnosticsRecord&, const SolverState& s) {
    const SlopeBudget b = slope_budget(s.u, s.t, c.profile);
    EXPECT_LE(std::abs(b.H), K + 0.5 * delta * delta + 1e-6 * (K + 0.5 * delta * delta));
    EXPECT_LE(b.m_prime, -b.lambda * b.m - 0.5 * b.m * b.m + K + 1e-6);
    ++checked;
  };
  ASSERT_EQ(run(c, hooks).kind, OutcomeKind::reached_horizon);
  EXPECT_GT(checked, 10u);
}

TEST(DatumSearch, SlopeOnlyPostcondition) {
  const auto g = Grid::make(25.0, 4096);
  for (auto fam : {InitialDatum::Family::gaussian_derivative, InitialDatum::Family::antisym_peak}) {
    const auto d = find_breaking_datum(fam, 5.0, 0.1, BreakingCriterion::slope_only, g);
    ASSERT_TRUE(d) << to_string(fam);
    EXPECT_TRUE(d->report.criterion1_satisfied);
    EXPECT_GE(d->margin, kSearchMargin);
    EXPECT_LT(d->margin, 0.2);
    const CriterionReport again = evaluate_criteria(d->datum, g, 0.1);
    EXPECT_EQ(again.margin1, d->report.margin1);
  }
}

TEST(DatumSearch, MixedSatisfiedWhenCheckedDirectly) {
  const auto g = Grid::make(25.0, 4096);
  const auto d = find_breaking_datum(InitialDatum::Family::antisym_peak, 5.0, 0.1, BreakingCriterion::mixed, g);
  ASSERT_TRUE(d);
  const Field u0 = make_datum(d->datum, g);
  const CriterionReport r = check_criterion2(u0, 0.1, *d->report.x1, d->datum.designated_slope());
  EXPECT_TRUE(r.criterion2_satisfied);
  EXPECT_GE(r.margin2, kSearchMargin);
  // Independent evaluation at x1 from the closed form.
  const double x1 = *d->report.x1;
  const double E0 = h1_norm_sq(u0);
  const double s = std::sqrt(0.01 + 2 * compute_K(E0));
  EXPECT_LT(d->datum.slope(x1), -std::abs(d->datum.value(x1)) - 0.1 - s);
}

TEST(DatumSearch, InfeasibleAndUnsupported) {
  const auto g = Grid::make(25.0, 512);
  EXPECT_FALSE(find_breaking_datum(InitialDatum::Family::gaussian_derivative, 0.05, 0.5,
                                   BreakingCriterion::slope_only, g));
  EXPECT_THROW(find_breaking_datum(InitialDatum::Family::gaussian, 5.0, 0.1, BreakingCriterion::slope_only, g),
               PreconditionError);
  EXPECT_THROW(find_breaking_datum(InitialDatum::Family::antisym_peak, -1.0, 0.1, BreakingCriterion::slope_only, g),
               PreconditionError);
  EXPECT_EQ(parse_criterion("mixed"), BreakingCriterion::mixed);
  EXPECT_FALSE(parse_criterion("both"));
}
