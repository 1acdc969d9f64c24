#include "adaptci/errors.hpp"
#include "adaptci/function_class.hpp"
#include "adaptci/modulus_oracle.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace adaptci;
using namespace adaptci::testing;

namespace {

HolderClass l2_class(double gamma, double C, std::vector<std::size_t> v = {1, 2})
{
  return HolderClass(gamma, C, IndexSet::from_one_based(2, v), MonotoneNorm::lp(2.0, 2));
}

std::vector<PointValue> envelope_points(const HolderClass& cls, double f0, Engine& rng, std::size_t n)
{
  std::vector<PointValue> pts{{std::vector<double>(cls.dim(), 0.0), f0}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(cls.dim());
    for (double& c : x)
      c = uniform(rng, -1.0, 1.0);
    pts.push_back({x, envelope_upper(cls, f0, x)});
  }
  return pts;
}

} // namespace

TEST_CASE("envelope examples")
{
  const HolderClass c11 = l2_class(1.0, 1.0);
  CHECK(envelope_upper(c11, 0.0, std::vector<double>{0.0, 0.0}) == 0.0);
  CHECK(envelope_lower(c11, 0.0, std::vector<double>{0.0, 0.0}) == 0.0);
  CHECK(envelope_upper(c11, 1.0, std::vector<double>{3.0, 4.0}) == doctest::Approx(6.0));
  CHECK(envelope_upper(l2_class(0.5, 2.0), 0.0, std::vector<double>{-1.0, 0.0}) == 0.0);
  CHECK(envelope_lower(c11, 1.0, std::vector<double>{-3.0, -4.0}) == doctest::Approx(-4.0));
}

TEST_CASE("lower envelope is the reflected upper envelope")
{
  Engine rng = make_engine(3, 0, 0);
  for (int t = 0; t < 200; ++t) {
    const HolderClass cls = l2_class(uniform(rng, 0.05, 1.0), uniform(rng, 0.0, 3.0),
                                     t % 2 ? std::vector<std::size_t>{1} : std::vector<std::size_t>{1, 2});
    const double f0 = uniform(rng, -2.0, 2.0);
    const std::vector<double> x{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const std::vector<double> mx{-x[0], -x[1]};
    CHECK(envelope_lower(cls, f0, x) == doctest::Approx(-envelope_upper(cls, -f0, mx)).epsilon(1e-14));
  }
}

TEST_CASE("class and ladder validation")
{
  CHECK_THROWS_AS(l2_class(0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(l2_class(1.5, 1.0), ValidationError);
  CHECK_THROWS_AS(l2_class(1.0, -1.0), ValidationError);
  CHECK_NOTHROW(l2_class(1.0, 0.0));
  CHECK_THROWS_AS(ClassLadder({}), ValidationError);
  CHECK_THROWS_AS(ClassLadder({l2_class(0.5, 1.0), l2_class(1.0, 1.0)}), ValidationError);
  CHECK_THROWS_AS(ClassLadder({l2_class(1.0, 2.0), l2_class(1.0, 1.0)}), ValidationError);
  CHECK_THROWS_AS(ClassLadder({l2_class(1.0, 1.0), l2_class(0.5, 1.0, {1})}), ValidationError);
  CHECK_NOTHROW(ClassLadder({l2_class(1.0, 1.0), l2_class(1.0, 1.0)}));
}

TEST_CASE("check_nesting")
{
  const Design d = Design::homoskedastic(2, {1.0, 0.0, -1.0, 0.0});
  SUBCASE("identical classes nest")
  {
    CHECK(check_nesting(ClassLadder({l2_class(0.5, 1.0), l2_class(0.5, 1.0)}), d).ok);
  }
  SUBCASE("same exponent, larger constant nests")
  {
    CHECK(check_nesting(ClassLadder({l2_class(0.7, 1.0), l2_class(0.7, 5.0)}), d).ok);
  }
  SUBCASE("distance 2 violates 1 * d vs 1 * d^0.5")
  {
    const NestingReport r = check_nesting(ClassLadder({l2_class(1.0, 1.0), l2_class(0.5, 1.0)}), d);
    REQUIRE_FALSE(r.ok);
    CHECK(r.level == 0);
    CHECK(r.distance == doctest::Approx(2.0));
    CHECK(r.max_violation == doctest::Approx(2.0 - std::sqrt(2.0)));
    CHECK(((r.first == 0 && r.second == 1) || (r.first == 1 && r.second == 0)));
  }
  SUBCASE("points within unit distance nest")
  {
    const Design close = Design::homoskedastic(2, {0.4, 0.0, -0.4, 0.3});
    CHECK(check_nesting(ClassLadder({l2_class(1.0, 1.0), l2_class(0.5, 1.0)}), close).ok);
  }
}

TEST_CASE("membership_feasible")
{
  const HolderClass c11 = l2_class(1.0, 1.0);
  CHECK(membership_feasible(c11, std::vector<PointValue>{{{0.3, 0.2}, 5.0}}));
  // comparable along V with a decreasing value
  CHECK_FALSE(membership_feasible(c11, std::vector<PointValue>{{{0.0, 0.0}, 0.0}, {{0.1, 0.1}, -0.01}}));
  // Hoelder bound violated
  CHECK_FALSE(membership_feasible(c11, std::vector<PointValue>{{{0.0, 0.0}, 0.0}, {{0.1, 0.0}, 0.2}}));
  // off V the function may decrease as long as the Hoelder bound holds
  const HolderClass c1only = l2_class(1.0, 1.0, {1});
  CHECK(membership_feasible(c1only, std::vector<PointValue>{{{0.0, 0.0}, 0.0}, {{0.0, 0.1}, -0.05}}));
  CHECK_THROWS_AS(membership_feasible(c11, std::vector<PointValue>{{{0.1, 0.1}, 0.0}, {{0.1, 0.1}, 1.0}}),
                  ValidationError);
  CHECK(membership_feasible(c11, std::vector<PointValue>{{{0.1, 0.1}, 1.0}, {{0.1, 0.1}, 1.0}}));
}

TEST_CASE("upper envelope is a class member, and so is a max of members")
{
  Engine rng = make_engine(5, 0, 0);
  for (int t = 0; t < 50; ++t) {
    const HolderClass cls = l2_class(uniform(rng, 0.1, 1.0), uniform(rng, 0.1, 3.0),
                                     t % 3 == 0 ? std::vector<std::size_t>{2} : std::vector<std::size_t>{1, 2});
    const auto pts = envelope_points(cls, uniform(rng, -1, 1), rng, 15);
    CHECK(membership_feasible(cls, pts));
    // a translated envelope h(x) = c + C ||(x - a)_{V+}||^gamma is also a member
    const std::vector<double> a{uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)};
    const double c = uniform(rng, -0.5, 0.5);
    std::vector<PointValue> shifted = pts, mx = pts;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::vector<double> xa{pts[i].x[0] - a[0], pts[i].x[1] - a[1]};
      shifted[i].value = envelope_upper(cls, c, xa);
      mx[i].value = std::max(pts[i].value, shifted[i].value);
    }
    CHECK(membership_feasible(cls, shifted));
    CHECK(membership_feasible(cls, mx));
  }
}

TEST_CASE("feasible assignments lie between the envelopes")
{
  Engine rng = make_engine(6, 0, 0);
  for (int t = 0; t < 10; ++t) {
    const RandomInstance inst = random_instance(rng, 8);
    const OrderedPair pair{inst.small, inst.large};
    const double b = uniform(rng, 0.1, 2.0);
    const OracleResult r = modulus_oracle_solve(pair, inst.design, b);
    for (std::size_t i = 0; i < inst.design.n(); ++i) {
      const auto x = inst.design.point(i);
      CHECK(r.f_from[i] <= envelope_upper(inst.small, 0.0, x) + 1e-7);
      CHECK(r.f_from[i] >= envelope_lower(inst.small, 0.0, x) - 1e-7);
      CHECK(r.f_to[i] <= envelope_upper(inst.large, b, x) + 1e-7);
      CHECK(r.f_to[i] >= envelope_lower(inst.large, b, x) - 1e-7);
    }
  }
}

TEST_CASE("conservative constant")
{
  const Design d = Design::homoskedastic(1, {0.0, 0.5, 1.0});
  const std::vector<double> y{0.0, 1.0, 1.5};
  // slopes 2, 1, 1.5 at gamma = 1
  CHECK(conservative_c(d, y, 1.0, MonotoneNorm::lp(2.0, 1)) == doctest::Approx(4.0));
}
