#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chernoff/bernstein.hpp"
#include "chernoff/errors.hpp"
#include "chernoff/quadrature.hpp"
#include "chernoff/subordinators.hpp"
#include "test_helpers.hpp"

using namespace chernoff;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const GaussLegendre& gl = gauss_legendre(8);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    s += gl.weights[i] * std::pow(gl.nodes[i], 14);  // degree 14 < 2*8-1
  CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
  double w = 0.0;
  for (double wi : gl.weights) w += wi;
  CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature hits smooth integrals") {
  auto q = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, M_PI,
                              1e-12);
  CHECK(q.value == doctest::Approx(2.0).epsilon(1e-11));
  CHECK(q.error_estimate < 1e-10);
}

TEST_CASE("eval_bernstein: pure drift and pure killing") {
  BernsteinTriplet drift;
  drift.lambda = 1.0;
  CHECK(eval_bernstein(drift, 3.0) == doctest::Approx(3.0).epsilon(1e-14));

  BernsteinTriplet kill;
  kill.sigma = 2.0;
  CHECK(eval_bernstein(kill, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("eval_bernstein: stable-1/2 density reproduces sqrt(z)") {
  // independent oracle: brute-force Riemann sum of the defining integral in
  // the substituted variable s = v^2 (removes the endpoint singularity), plus
  // the analytic remainder of the s^{-3/2} tail beyond V^2 where 1-e^{-s} = 1
  auto integrand_v = [](double v) {
    const double s = v * v;
    return (1.0 - std::exp(-s)) * std::pow(s, -1.5) / (2.0 * std::sqrt(M_PI)) *
           2.0 * v;
  };
  const double V = 40.0;
  const double brute = testing::riemann(integrand_v, 1e-8, V, 4000000) +
                       1.0 / (std::sqrt(M_PI) * V);
  CHECK(brute == doctest::Approx(1.0).epsilon(1e-6));  // closed form sqrt(1)

  BernsteinTriplet tr = triplet_stable_half(1.0);
  CHECK(eval_bernstein(tr, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(eval_bernstein(tr, 4.0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(eval_bernstein(tr, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("eval_bernstein: gamma triplet reproduces log(1+z)") {
  BernsteinTriplet tr = triplet_gamma(1.0);
  for (double z : {0.3, 1.0, 7.5})
    CHECK(eval_bernstein(tr, z) == doctest::Approx(std::log1p(z)).epsilon(1e-9));
}

TEST_CASE("eval_bernstein: inverse-gaussian triplet closed form") {
  const double delta = 0.8, gamma = 1.3;
  BernsteinTriplet tr = triplet_inverse_gaussian(delta, gamma);
  for (double z : {0.1, 1.0, 10.0}) {
    const double want = delta * (std::sqrt(2.0 * z + gamma * gamma) - gamma);
    CHECK(eval_bernstein(tr, z) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("eval_bernstein is nondecreasing and concave on a grid") {
  for (const BernsteinTriplet& tr :
       {triplet_stable_half(1.0), triplet_gamma(2.0),
        triplet_inverse_gaussian(1.0, 0.5)}) {
    std::vector<double> zs, fs;
    for (int i = 0; i <= 40; ++i) zs.push_back(0.05 + 0.25 * i);
    for (double z : zs) fs.push_back(eval_bernstein(tr, z));
    for (std::size_t i = 1; i < fs.size(); ++i)
      CHECK(fs[i] >= fs[i - 1] - 1e-10);
    for (std::size_t i = 1; i + 1 < fs.size(); ++i)
      CHECK(fs[i + 1] - 2.0 * fs[i] + fs[i - 1] <= 1e-10);
  }
}

TEST_CASE("eval_bernstein(triplet, 0) equals sigma exactly") {
  BernsteinTriplet tr = triplet_gamma(1.0);
  tr.sigma = 0.7;
  CHECK(eval_bernstein(tr, 0.0) == 0.7);
}

TEST_CASE("atoms contribute 1 - e^{-sz}") {
  BernsteinTriplet tr;
  tr.mu = LevyMeasure::from_atoms({{1.0, 2.0}, {0.5, 1.0}});
  const double z = 1.7;
  const double want =
      2.0 * (1.0 - std::exp(-z)) + 1.0 * (1.0 - std::exp(-0.5 * z));
  CHECK(eval_bernstein(tr, z) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("laplace_residual: matched pairs are small, mismatched pairs large") {
  // 1/2-stable law vs its triplet (analytic Laplace pair e^{-t sqrt(x)})
  auto stable = SubordinatorLaw::stable_half(1.0);
  CHECK(laplace_residual(stable, triplet_stable_half(1.0), 1.0, 1.0) < 1e-6);

  // Gamma law vs its triplet at x = 0: both sides equal 1
  auto gam = SubordinatorLaw::gamma(1.0);
  CHECK(laplace_residual(gam, triplet_gamma(1.0), 1.0, 0.0) ==
        doctest::Approx(0.0).epsilon(1e-9));

  // negative control: deliberately mismatched pair
  CHECK(laplace_residual(gam, triplet_stable_half(1.0), 1.0, 1.0) > 0.1);
}

TEST_CASE("laplace_residual grid: every shipped pair below 1e-6") {
  std::vector<std::pair<SubordinatorLaw, BernsteinTriplet>> pairs;
  pairs.emplace_back(SubordinatorLaw::stable_half(1.0), triplet_stable_half(1.0));
  pairs.emplace_back(SubordinatorLaw::gamma(1.0), triplet_gamma(1.0));
  pairs.emplace_back(SubordinatorLaw::inverse_gaussian(1.0, 1.0),
                     triplet_inverse_gaussian(1.0, 1.0));
  LevyMeasure cp_mu = LevyMeasure::from_atoms({{1.0, 1.0}});
  BernsteinTriplet cp_tr;
  cp_tr.mu = cp_mu;
  pairs.emplace_back(SubordinatorLaw::compound_poisson(cp_mu), cp_tr);
  for (const auto& [law, tr] : pairs)
    for (double t : {0.1, 1.0, 5.0})
      for (double x : {0.1, 1.0, 10.0}) {
        INFO(law.name, " t=", t, " x=", x);
        CHECK(laplace_residual(law, tr, t, x) < 1e-6);
      }
}

TEST_CASE("levy measure validation rejects bad data") {
  LevyMeasure bad;
  bad.atoms = {{-1.0, 1.0}};
  CHECK_THROWS_AS(validate_levy_measure(bad), ValidationError);

  LevyMeasure flag;
  flag.bounded = true;
  flag.total_mass = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate_levy_measure(flag), ValidationError);

  BernsteinTriplet neg;
  neg.sigma = -1.0;
  CHECK_THROWS_AS(validate_triplet(neg), ValidationError);
}

TEST_CASE("degenerate triplet (0,0,0) is accepted and f == 0") {
  BernsteinTriplet tr;
  validate_triplet(tr);
  CHECK(eval_bernstein(tr, 5.0) == 0.0);
}
