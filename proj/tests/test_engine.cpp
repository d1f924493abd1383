#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "chernoff/engine.hpp"
#include "chernoff/errors.hpp"
#include "chernoff/oracles.hpp"
#include "test_helpers.hpp"

using namespace chernoff;
using chernoff::testing::make_diffusion_chernoff_step;
using chernoff::testing::make_identity_step;

namespace {

struct HeatFixture {
  EuclideanGrid grid;
  std::shared_ptr<DiffusionStep> diff;
  ChernoffStep step;
  GaussBump phi{2.0, 0.0};
  SampledFunction f;

  explicit HeatFixture(double R = 16.0, int n = 321) {
    grid = EuclideanGrid::make(1, R, n);
    diff = std::make_shared<DiffusionStep>(
        grid, DiffusionCoefficients::constant_coeffs({1.0, 0.0, 1.0},
                                                     {0.0, 0.0}, 0.0));
    step = make_diffusion_chernoff_step(diff);
    f = grid.sample([&](std::array<double, 2> p) { return phi.eval(p[0]); });
  }

  SampledFunction exact_T(double s) const {
    return heat_on_gauss(grid, phi, 1.0, 0.0, 0.0, s);
  }
};

LevyMeasure unit_atom_measure() {
  return LevyMeasure::from_atoms({{1.0, 1.0}});
}

}  // namespace

TEST_CASE("m_default values") {
  CHECK(m_default(0.1) == 10);
  CHECK(m_default(2.0) == 1);  // floor gives 0, clamped to 1
  CHECK(m_default(1.0 / 3.0) == 3);
  CHECK(schedule_m(MSchedule::parse("floor-inverse-unclamped"), 2.0) == 0);
  CHECK(schedule_m(MSchedule::parse("const:5"), 0.01) == 5);
  CHECK_THROWS_AS(MSchedule::parse("bogus"), ValidationError);
}

TEST_CASE("power_apply basics") {
  HeatFixture fx;
  // m = 1 is a single application
  SampledFunction a = power_apply(fx.step, 0.4, 1, fx.f);
  SampledFunction b = fx.step.apply(0.4, fx.f);
  CHECK(sup_distance(a, b) == 0.0);
  // identity step is inert for any m
  auto id = make_identity_step(fx.f.size());
  CHECK(sup_distance(power_apply(id, 2.0, 7, fx.f), fx.f) == 0.0);
  // heat: result independent of m up to quadrature error
  SampledFunction m1 = power_apply(fx.step, 0.8, 1, fx.f);
  SampledFunction m8 = power_apply(fx.step, 0.8, 8, fx.f);
  CHECK(sup_distance(m1, m8) < 1e-8);
}

TEST_CASE("f0_step: zero measure gives the identity for all t") {
  HeatFixture fx;
  BernsteinTriplet tr;  // (0,0,0)
  auto cfg = make_subordination_config(tr, SubordinatorLaw::gamma(1.0),
                                       MSchedule::parse("floor-inverse"), 16);
  for (double t : {0.0, 0.3, 2.0}) {
    SampledFunction u = f0_step(cfg, fx.step, t, fx.f);
    CHECK(sup_distance(u, fx.f) == 0.0);
  }
}

TEST_CASE("f0_step with compound Poisson equals the Poisson series") {
  HeatFixture fx;
  BernsteinTriplet tr;
  tr.mu = unit_atom_measure();
  auto cfg = make_subordination_config(
      tr, SubordinatorLaw::compound_poisson(tr.mu),
      MSchedule::parse("floor-inverse"), 16);
  cfg.allow_atomic_eta = true;
  const double t = 0.7;
  SampledFunction got = f0_step(cfg, fx.step, t, fx.f);
  // oracle: sum_k e^{-t} t^k / k! Heat_k phi with closed-form heat
  SampledFunction want;
  want.values.assign(fx.f.size(), 0.0);
  double pk = std::exp(-t), cum = 0.0;
  for (int k = 0; cum < 1.0 - 1e-14; ++k) {
    if (k > 0) pk *= t / k;
    SampledFunction Tk = fx.exact_T((double)k);
    for (std::size_t i = 0; i < want.values.size(); ++i)
      want.values[i] += pk * Tk.values[i];
    cum += pk;
  }
  CHECK(sup_distance(got, want) < 1e-8);
  // atomic law without the flag is rejected
  cfg.allow_atomic_eta = false;
  CHECK_THROWS_AS(f0_step(cfg, fx.step, t, fx.f), ValidationError);
}

TEST_CASE("f0_step is a contraction") {
  HeatFixture fx;
  auto cfg = make_subordination_config(triplet_stable_half(1.0),
                                       SubordinatorLaw::stable_half(1.0),
                                       MSchedule::parse("floor-inverse"), 64);
  for (double t : {0.1, 1.0}) {
    SampledFunction u = f0_step(cfg, fx.step, t, fx.f);
    CHECK(u.sup_norm() <= fx.f.sup_norm() + 1e-6);
  }
}

TEST_CASE("subordinate_step degenerate triplets") {
  HeatFixture fx;
  // sigma=0, lambda=1, mu=0: the original step
  BernsteinTriplet drift;
  drift.lambda = 1.0;
  auto cfg = make_subordination_config(drift, SubordinatorLaw::gamma(1.0),
                                       MSchedule::parse("floor-inverse"), 16);
  const double t = 0.5;
  SampledFunction a = subordinate_step(cfg, fx.step, t, fx.f);
  SampledFunction b = fx.step.apply(t, fx.f);
  CHECK(sup_distance(a, b) == 0.0);

  // sigma=s0, lambda=0, mu=0: pure killing
  BernsteinTriplet kill;
  kill.sigma = 1.3;
  auto cfg2 = make_subordination_config(kill, SubordinatorLaw::gamma(1.0),
                                        MSchedule::parse("floor-inverse"), 16);
  SampledFunction c = subordinate_step(cfg2, fx.step, t, fx.f);
  for (std::size_t i = 0; i < c.values.size(); ++i)
    CHECK(c.values[i] ==
          doctest::Approx(std::exp(-1.3 * t) * fx.f.values[i]).epsilon(1e-14));
}

TEST_CASE("subordinate_step full triplet matches the composition oracle") {
  HeatFixture fx;
  BernsteinTriplet tr;
  tr.sigma = 0.4;
  tr.lambda = 0.6;
  tr.mu = unit_atom_measure();
  auto cfg = make_subordination_config(
      tr, SubordinatorLaw::compound_poisson(tr.mu),
      MSchedule::parse("floor-inverse"), 16);
  cfg.allow_atomic_eta = true;
  const double t = 0.8;
  SampledFunction got = subordinate_step(cfg, fx.step, t, fx.f);
  // e^{-sigma t} Heat_{lambda t} (Poisson series)
  SampledFunction want;
  want.values.assign(fx.f.size(), 0.0);
  double pk = std::exp(-t), cum = 0.0;
  for (int k = 0; cum < 1.0 - 1e-14; ++k) {
    if (k > 0) pk *= t / k;
    SampledFunction Tk = fx.exact_T((double)k + tr.lambda * t);
    for (std::size_t i = 0; i < want.values.size(); ++i)
      want.values[i] += pk * Tk.values[i];
    cum += pk;
  }
  for (auto& v : want.values) v *= std::exp(-tr.sigma * t);
  CHECK(sup_distance(got, want) < 1e-7);
}

TEST_CASE("bounded_levy_step: mu=0 reduces to e^{-sigma t} F(lambda t)") {
  HeatFixture fx;
  BernsteinTriplet tr;
  tr.sigma = 0.2;
  tr.lambda = 0.9;
  auto cfg = make_subordination_config(tr, SubordinatorLaw::gamma(1.0),
                                       MSchedule::parse("floor-inverse"), 16);
  const double t = 0.6;
  SampledFunction a = bounded_levy_step(cfg, fx.step, t, fx.f);
  SampledFunction b = fx.step.apply(tr.lambda * t, fx.f);
  for (auto& v : b.values) v *= std::exp(-tr.sigma * t);
  CHECK(sup_distance(a, b) < 1e-15);
  // t = 0 is the identity
  SampledFunction id = bounded_levy_step(cfg, fx.step, 0.0, fx.f);
  CHECK(sup_distance(id, fx.f) == 0.0);
}

TEST_CASE("bounded_levy_step: single atom inner bracket") {
  HeatFixture fx;
  BernsteinTriplet tr;
  tr.mu = LevyMeasure::from_atoms({{0.7, 2.0}});  // K delta_a, K=2, a=0.7
  auto cfg = make_subordination_config(
      tr, SubordinatorLaw::compound_poisson(tr.mu),
      MSchedule::parse("floor-inverse"), 16);
  const double t = 0.3;
  SampledFunction got = bounded_levy_step(cfg, fx.step, t, fx.f);
  SampledFunction Ta = fx.exact_T(0.7);
  SampledFunction want = fx.f;
  for (std::size_t i = 0; i < want.values.size(); ++i)
    want.values[i] += t * 2.0 * (Ta.values[i] - fx.f.values[i]);
  CHECK(sup_distance(got, want) < 1e-8);
  // unbounded mu is a domain error
  auto cfg2 = make_subordination_config(triplet_stable_half(1.0),
                                        SubordinatorLaw::stable_half(1.0),
                                        MSchedule::parse("floor-inverse"), 16);
  CHECK_THROWS_AS(bounded_levy_step(cfg2, fx.step, t, fx.f), ValidationError);
}

TEST_CASE("contraction cascade: F_mu norm bounded by e^{2tK}") {
  HeatFixture fx;
  BernsteinTriplet tr;
  tr.mu = LevyMeasure::from_atoms({{1.0, 1.5}});  // K = 1.5
  auto cfg = make_subordination_config(
      tr, SubordinatorLaw::compound_poisson(tr.mu),
      MSchedule::parse("floor-inverse"), 16);
  for (double t : {0.1, 0.5, 1.0}) {
    SampledFunction u = bounded_levy_step(cfg, fx.step, t, fx.f);
    CHECK(u.sup_norm() <=
          std::exp(2.0 * t * 1.5) * fx.f.sup_norm() + 1e-9);
  }
}

TEST_CASE("variable_coeff_step: constant fields reduce to subordinate_step") {
  HeatFixture fx;
  BernsteinTriplet tr;
  tr.sigma = 0.3;
  tr.lambda = 0.8;
  tr.mu = unit_atom_measure();
  auto cfg = make_subordination_config(
      tr, SubordinatorLaw::compound_poisson(tr.mu),
      MSchedule::parse("floor-inverse"), 16);
  cfg.allow_atomic_eta = true;
  CoefficientField fields;
  fields.sigma_at = [](std::size_t) { return 0.3; };
  fields.lambda_at = [](std::size_t) { return 0.8; };
  fields.lambda_min = 0.5;
  fields.lambda_max = 1.0;
  fields.sigma_min = 0.0;
  const double t = 0.4;
  SampledFunction a = variable_coeff_step(fields, cfg, fx.step, t, fx.f);
  SampledFunction b = subordinate_step(cfg, fx.step, t, fx.f);
  CHECK(sup_distance(a, b) < 1e-10);
}

TEST_CASE("variable_coeff_step: sigma(x) only probes to L phi - sigma phi") {
  HeatFixture fx(16.0, 641);
  BernsteinTriplet tr;
  tr.lambda = 1.0;
  auto cfg = make_subordination_config(tr, SubordinatorLaw::gamma(1.0),
                                       MSchedule::parse("floor-inverse"), 16);
  CoefficientField fields;
  const auto& grid = fx.grid;
  fields.sigma_at = [grid](std::size_t i) {
    const double x = grid.coord((int)i);
    return 0.5 + 0.3 * std::exp(-x * x);
  };
  fields.lambda_at = [](std::size_t) { return 1.0; };
  fields.lambda_min = 0.9;
  fields.lambda_max = 1.1;
  fields.sigma_min = 0.0;
  const double t = 1e-3;
  SampledFunction u = variable_coeff_step(fields, cfg, fx.step, t, fx.f);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.coord((int)i);
    if (std::abs(x) > 8.0) continue;
    const double v = fx.f.values[i];
    const double lphi = 0.5 * (x * x / 16.0 - 0.25) * v;  // (1/2) phi'' (width 2)
    const double sig = 0.5 + 0.3 * std::exp(-x * x);
    worst = std::max(worst, std::abs((u.values[i] - v) / t - (lphi - sig * v)));
  }
  CHECK(worst < 1e-2);
}

TEST_CASE("variable lambda interpolates between constant-lambda envelopes") {
  HeatFixture fx;
  BernsteinTriplet tr;
  tr.lambda = 1.0;  // lambda scale handled by the field
  auto cfg = make_subordination_config(tr, SubordinatorLaw::gamma(1.0),
                                       MSchedule::parse("floor-inverse"), 16);
  const double l1 = 0.5, l2 = 1.5, t = 0.2;
  const auto& grid = fx.grid;
  CoefficientField fields;
  fields.sigma_at = [](std::size_t) { return 0.0; };
  fields.lambda_at = [grid, l1, l2](std::size_t i) {
    const double x = grid.coord((int)i);
    return l1 + (l2 - l1) * 0.5 * (1.0 + std::tanh(x));
  };
  fields.lambda_min = l1;
  fields.lambda_max = l2;
  fields.sigma_min = 0.0;
  SampledFunction mid = variable_coeff_step(fields, cfg, fx.step, t, fx.f);
  SampledFunction lo = fx.step.apply(l1 * t, fx.f);
  SampledFunction hi = fx.step.apply(l2 * t, fx.f);
  // away from the interface the output matches the matching constant run
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.coord((int)i);
    if (x < -6.0 && std::abs(x) < 10.0)
      CHECK(mid.values[i] == doctest::Approx(lo.values[i]).epsilon(1e-6));
    if (x > 6.0 && std::abs(x) < 10.0)
      CHECK(mid.values[i] == doctest::Approx(hi.values[i]).epsilon(1e-6));
  }
}

TEST_CASE("chernoff_iterate: n = 1 is a single family application") {
  HeatFixture fx;
  auto cfg = make_subordination_config(triplet_stable_half(1.0),
                                       SubordinatorLaw::stable_half(1.0),
                                       MSchedule::parse("floor-inverse"), 32);
  auto family = [&](double t, const SampledFunction& p) {
    return subordinate_step(cfg, fx.step, t, p);
  };
  IterateResult r = chernoff_iterate(family, cfg, fx.f.size(), 0.5, 1, fx.f);
  SampledFunction direct = family(0.5, fx.f);
  CHECK(sup_distance(r.value, direct) == 0.0);
  CHECK(r.level_sup_norms.size() == 1);
}

TEST_CASE("chernoff_iterate budget guard fires") {
  HeatFixture fx;
  auto cfg = make_subordination_config(triplet_stable_half(1.0),
                                       SubordinatorLaw::stable_half(1.0),
                                       MSchedule::parse("floor-inverse"), 64);
  cfg.budget = 1e3;
  auto family = [&](double t, const SampledFunction& p) {
    return subordinate_step(cfg, fx.step, t, p);
  };
  CHECK_THROWS_AS(chernoff_iterate(family, cfg, fx.f.size(), 1.0, 32, fx.f),
                  BudgetError);
}

TEST_CASE("exact-semigroup family: iterate output independent of n") {
  HeatFixture fx;
  BernsteinTriplet drift;
  drift.lambda = 1.0;
  auto cfg = make_subordination_config(drift, SubordinatorLaw::gamma(1.0),
                                       MSchedule::parse("floor-inverse"), 16);
  auto family = [&](double t, const SampledFunction& p) {
    return subordinate_step(cfg, fx.step, t, p);
  };
  IterateResult a = chernoff_iterate(family, cfg, fx.f.size(), 0.8, 2, fx.f);
  IterateResult b = chernoff_iterate(family, cfg, fx.f.size(), 0.8, 8, fx.f);
  CHECK(sup_distance(a.value, b.value) < 1e-8);
}

TEST_CASE("subordinate_oracle_exact: compound Poisson reproduces the series") {
  HeatFixture fx;
  auto law = SubordinatorLaw::compound_poisson(unit_atom_measure());
  const double t = 0.9;
  SampledFunction got = subordinate_oracle_exact(
      law, [&](double s) { return fx.exact_T(s); }, t);
  SampledFunction want;
  want.values.assign(fx.f.size(), 0.0);
  double pk = std::exp(-t), cum = 0.0;
  for (int k = 0; cum < 1.0 - 1e-13; ++k) {
    if (k > 0) pk *= t / k;
    SampledFunction Tk = fx.exact_T((double)k);
    for (std::size_t i = 0; i < want.values.size(); ++i)
      want.values[i] += pk * Tk.values[i];
    cum += pk;
  }
  CHECK(sup_distance(got, want) < 1e-10);
}

TEST_CASE("mc oracle agrees with the exact oracle within 3 stderr") {
  HeatFixture fx(12.0, 121);  // coarse grid keeps the run fast
  auto cfg = make_subordination_config(triplet_gamma(1.0),
                                       SubordinatorLaw::gamma(1.0),
                                       MSchedule::parse("floor-inverse"), 32);
  const double t = 1.0;
  McOracleResult mc =
      subordinate_oracle_mc(cfg, fx.step, t, fx.f, 10000, 20240817);
  SampledFunction exact = subordinate_oracle_exact(
      cfg.law, [&](double s) { return fx.exact_T(s); }, t);
  int outside = 0;
  for (std::size_t i = 0; i < exact.values.size(); ++i) {
    const double dev = std::abs(mc.mean.values[i] - exact.values[i]);
    if (dev > 3.0 * mc.stderr_band[i] + 2e-4) ++outside;
  }
  CHECK(outside == 0);
  // seed determinism
  McOracleResult mc2 =
      subordinate_oracle_mc(cfg, fx.step, t, fx.f, 10000, 20240817);
  CHECK(sup_distance(mc.mean, mc2.mean) == 0.0);
  // budget guard
  auto tight = cfg;
  tight.budget = 10.0;
  CHECK_THROWS_AS(
      subordinate_oracle_mc(tight, fx.step, t, fx.f, 10000, 1), BudgetError);
}

TEST_CASE("lf0 generator oracle: atoms and probe consistency") {
  HeatFixture fx;
  // mu = 0 gives the zero function
  SampledFunction z = lf0_generator_oracle(
      LevyMeasure::zero(), [&](double s) { return fx.exact_T(s); }, fx.f);
  CHECK(z.sup_norm() == 0.0);
  // mu = K delta_a gives K (T_a phi - phi)
  LevyMeasure mu = LevyMeasure::from_atoms({{0.5, 3.0}});
  SampledFunction got = lf0_generator_oracle(
      mu, [&](double s) { return fx.exact_T(s); }, fx.f);
  SampledFunction Ta = fx.exact_T(0.5);
  for (std::size_t i = 0; i < got.values.size(); ++i)
    CHECK(got.values[i] ==
          doctest::Approx(3.0 * (Ta.values[i] - fx.f.values[i]))
              .epsilon(1e-10));
  // generator probe of F_mu at small t matches the oracle
  BernsteinTriplet tr;
  tr.mu = mu;
  auto cfg = make_subordination_config(
      tr, SubordinatorLaw::compound_poisson(mu),
      MSchedule::parse("floor-inverse"), 16);
  const double t = 1e-3;
  SampledFunction probe = generator_probe(
      [&](double tt, const SampledFunction& p) {
        return bounded_levy_step(cfg, fx.step, tt, p);
      },
      fx.f, t);
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.values.size(); ++i)
    worst = std::max(worst, std::abs(probe.values[i] - got.values[i]));
  CHECK(worst < 5e-2);  // O(t) + quadrature
}

TEST_CASE("strong continuity anchor: F(t) phi -> phi") {
  HeatFixture fx;
  auto cfg = make_subordination_config(triplet_stable_half(1.0),
                                       SubordinatorLaw::stable_half(1.0),
                                       MSchedule::parse("floor-inverse"), 64);
  double prev = 1e9;
  for (double t : {0.1, 0.01, 0.001}) {
    SampledFunction u = subordinate_step(cfg, fx.step, t, fx.f);
    const double dist = sup_distance(u, fx.f);
    CHECK(dist < prev);
    prev = dist;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("equivalence: F via CompoundPoisson law vs F_mu, same oracle") {
  HeatFixture fx;
  BernsteinTriplet tr;
  tr.mu = unit_atom_measure();
  auto cfg = make_subordination_config(
      tr, SubordinatorLaw::compound_poisson(tr.mu),
      MSchedule::parse("floor-inverse"), 16);
  cfg.allow_atomic_eta = true;
  const double t = 1.0;
  const int n = 32;
  auto famF = [&](double tt, const SampledFunction& p) {
    return subordinate_step(cfg, fx.step, tt, p);
  };
  auto famMu = [&](double tt, const SampledFunction& p) {
    return bounded_levy_step(cfg, fx.step, tt, p);
  };
  SampledFunction a =
      chernoff_iterate(famF, cfg, fx.f.size(), t, n, fx.f).value;
  SampledFunction b =
      chernoff_iterate(famMu, cfg, fx.f.size(), t, n, fx.f).value;
  SampledFunction oracle = subordinate_oracle_exact(
      cfg.law, [&](double s) { return fx.exact_T(s); }, t);
  const double ea = sup_distance(a, oracle);
  const double eb = sup_distance(b, oracle);
  CHECK(sup_distance(a, b) <= ea + eb + 1e-15);
  CHECK(eb < 1e-3);
}

TEST_CASE("mismatched law and triplet are rejected at config build") {
  CHECK_THROWS_AS(
      make_subordination_config(triplet_stable_half(1.0),
                                SubordinatorLaw::gamma(1.0),
                                MSchedule::parse("floor-inverse"), 32),
      ValidationError);
}
