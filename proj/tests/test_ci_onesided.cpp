#include "adaptci/ci_adaptive.hpp"
#include "adaptci/ci_onesided.hpp"
#include "adaptci/errors.hpp"
#include "adaptci/normal.hpp"
#include "adaptci/simulate.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace adaptci;
using namespace adaptci::testing;

namespace {

Design uniform_design(std::size_t n, std::uint64_t seed)
{
  return Design::homoskedastic(2, draw_uniform_design(n, 0.35355339059327373, seed, 9, 0));
}

} // namespace

TEST_CASE("hinge weights")
{
  const Design d = Design::homoskedastic(2, {0.0, 0.0, -0.9, -0.9});
  const ModulusSolution s = forward_modulus(three_point_pair(), d, 1.0);
  const auto D = hinge_weights(s, d);
  CHECK(D[0] == doctest::Approx(s.b).epsilon(1e-14)); // origin: both penalties vanish
  CHECK(2.0 * std::hypot(0.9, 0.9) >= s.b);          // closed hinge at the far point
  CHECK(D[1] == 0.0);

  const Design d3 = three_point_design();
  const ModulusSolution s3 = forward_modulus(three_point_pair(), d3, 0.7);
  const auto D3 = hinge_weights(s3, d3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(D3[i] == doctest::Approx(s3.f_to[i] - s3.f_from[i]).epsilon(1e-14));

  ModulusSolution zero = s3;
  std::fill(zero.D.begin(), zero.D.end(), 0.0);
  CHECK_THROWS_AS(hinge_weights(zero, d3), AllZeroWeights);
}

TEST_CASE("single point at the origin gives the classical one-sided bounds")
{
  const Design d = Design::homoskedastic(2, {0.0, 0.0});
  const ClassLadder ladder = two_level_ladder();
  const std::vector<double> y{0.37};
  const double z = normal_upper_quantile(0.05);
  for (std::size_t j = 0; j < 2; ++j) {
    const OneSidedBound lo = lower_bound(d, y, ladder, j, 0.05);
    const OneSidedBound up = upper_bound(d, y, ladder, j, 0.05);
    CHECK(std::abs(lo.value - (0.37 - z)) <= 1e-9);
    CHECK(std::abs(up.value - (0.37 + z)) <= 1e-9);
    CHECK(lo.sd == doctest::Approx(1.0));
    CHECK(lo.max_bias_halfwidth == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("noise-free data from any member of the large class is covered")
{
  const Design d = uniform_design(200, 1);
  const ClassLadder ladder = two_level_ladder();
  const LadderModuli moduli(ladder, d);
  for (std::size_t j = 0; j < 2; ++j) {
    for (Side side : {Side::lower, Side::upper}) {
      const ModulusSolution s = moduli.problem(side, j).solve(2.5);
      for (const auto* f : {&s.f_from, &s.f_to}) {
        const double f0 = f == &s.f_from ? 0.0 : s.b;
        const double lo = lower_bound(d, *f, ladder, j, 0.05).value;
        const double up = upper_bound(d, *f, ladder, j, 0.05).value;
        CHECK(lo <= f0 + 1e-12);
        CHECK(up >= f0 - 1e-12);
      }
    }
  }
}

TEST_CASE("upper bound is the reflected lower bound")
{
  Engine rng = make_engine(31, 0, 0);
  for (int t = 0; t < 10; ++t) {
    const RandomInstance inst = random_instance(rng);
    const ClassLadder ladder({inst.small, inst.large});
    const auto y = draw_normals(rng, inst.design.n());
    std::vector<double> my(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      my[i] = -y[i];
    for (std::size_t j = 0; j < 2; ++j) {
      const double up = upper_bound(inst.design, y, ladder, j, 0.05).value;
      const double lo = lower_bound(inst.design.reflected(), my, ladder, j, 0.05).value;
      CHECK(std::abs(up + lo) <= 1e-12 * std::max(1.0, std::abs(up)));
    }
  }
}

TEST_CASE("estimator is affine in the data")
{
  const Design d = uniform_design(100, 2);
  const LadderModuli moduli(two_level_ladder(), d);
  const OneSidedRule rule = make_rule(moduli, Side::lower, 0, 0.05);
  Engine rng = make_engine(32, 0, 0);
  const auto base = draw_normals(rng, 100);
  const auto u = draw_normals(rng, 100);
  std::vector<double> y1(100), y2(100);
  for (std::size_t i = 0; i < 100; ++i) {
    y1[i] = base[i] + u[i];
    y2[i] = base[i] + 2.0 * u[i];
  }
  const double e0 = rule.estimator(base), e1 = rule.estimator(y1), e2 = rule.estimator(y2);
  CHECK(std::abs((e2 - e0) - 2.0 * (e1 - e0)) <= 1e-12);
}

TEST_CASE("Monte Carlo coverage and excess length of the one-sided bounds")
{
  const double alpha = 0.05;
  const Design d = uniform_design(100, 3);
  const ClassLadder ladder = two_level_ladder();
  const LadderModuli moduli(ladder, d);
  const std::size_t reps = 2000;
  for (std::size_t j = 0; j < 2; ++j) {
    const OneSidedRule lo = make_rule(moduli, Side::lower, j, alpha);
    const OneSidedRule up = make_rule(moduli, Side::upper, j, alpha);
    std::size_t cover_lo = 0, cover_up = 0;
    double excess = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      Engine rng = make_engine(33, j, r);
      const auto y = draw_normals(rng, 100); // truth f = 0, a member of every class
      const double l = lo.apply(y);
      cover_lo += l <= 0.0;
      cover_up += up.apply(y) >= 0.0;
      excess += -l;
    }
    CHECK(cover_lo >= static_cast<std::size_t>((0.95 - 0.015) * reps));
    CHECK(cover_up >= static_cast<std::size_t>((0.95 - 0.015) * reps));
    // worst-case expected excess length over F_j is omega(z_{1-alpha}, F_J, F_j)
    const double bound = moduli.lower(j).omega(normal_upper_quantile(alpha));
    CHECK(excess / reps <= bound * 1.02);
  }
}

TEST_CASE("crossed bounds are rare and reported as an empty interval")
{
  // lower and upper bounds of level j use different estimators, so at the
  // Bonferroni level they can cross on extreme noise draws
  const Design d = uniform_design(100, 3);
  const LadderModuli moduli(two_level_ladder(), d);
  const double tau = 0.0125;
  const OneSidedRule lo = make_rule(moduli, Side::lower, 0, tau);
  const OneSidedRule up = make_rule(moduli, Side::upper, 0, tau);
  const std::size_t reps = 20000;
  std::size_t crossed = 0;
  std::vector<double> witness;
  for (std::size_t r = 0; r < reps; ++r) {
    Engine rng = make_engine(33, 0, r);
    auto y = draw_normals(rng, 100);
    if (lo.apply(y) > up.apply(y)) {
      ++crossed;
      if (witness.empty())
        witness = y;
    }
  }
  CHECK(crossed <= reps / 200);
  REQUIRE_FALSE(witness.empty());
  const AdaptiveCI ci = interval_at_level(moduli, witness, tau, CiMethod::bonferroni);
  CHECK(ci.empty);
  CHECK(ci.length() == 0.0);
  CHECK_FALSE(ci.covers(0.0));
  CHECK_FALSE(ci.diagnostics.empty());
}

TEST_CASE("argument validation")
{
  const Design d = three_point_design();
  const ClassLadder ladder({lipschitz(1.0), lipschitz(2.0)});
  const std::vector<double> y{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(lower_bound(d, y, ladder, 0, 0.0), ValidationError);
  CHECK_THROWS_AS(lower_bound(d, y, ladder, 0, 1.0), ValidationError);
  CHECK_THROWS_AS(lower_bound(d, y, ladder, 2, 0.05), ValidationError);
  CHECK_THROWS_AS(lower_bound(d, std::vector<double>{0.0}, ladder, 0, 0.05), ValidationError);
}
