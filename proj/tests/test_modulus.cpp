#include "adaptci/errors.hpp"
#include "adaptci/modulus.hpp"
#include "adaptci/modulus_oracle.hpp"
#include "adaptci/normal.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace adaptci;
using namespace adaptci::testing;

namespace {

std::vector<PointValue> with_origin(const Design& d, const std::vector<double>& vals, double at0)
{
  std::vector<PointValue> pts{{std::vector<double>(d.k(), 0.0), at0}};
  for (std::size_t i = 0; i < d.n(); ++i) {
    const auto p = d.point(i);
    pts.push_back({std::vector<double>(p.begin(), p.end()), vals[i]});
  }
  return pts;
}

} // namespace

TEST_CASE("inverse modulus trivial cases")
{
  const Design d = three_point_design();
  const OrderedPair pair = three_point_pair();
  CHECK(inverse_modulus(pair, d, 0.0) == 0.0);
  const Design origin = Design::homoskedastic(2, {0.0, 0.0});
  CHECK(inverse_modulus(pair, origin, 1.7) == doctest::Approx(1.7).epsilon(1e-15));
  CHECK_THROWS_AS(inverse_modulus(pair, d, -1.0), ValidationError);
  CHECK_THROWS_AS(inverse_modulus(OrderedPair{lipschitz(2.0), HolderClass(1.0, 1.0, IndexSet::all(2),
                                                                         MonotoneNorm::lp(1.0, 2))},
                                  d, 1.0),
                  ValidationError);
}

TEST_CASE("three-point instance against the QP oracle, both directions")
{
  const Design d = three_point_design();
  const OrderedPair fwd = three_point_pair();
  const OrderedPair bwd{fwd.to, fwd.from};
  for (const OrderedPair& pair : {fwd, bwd}) {
    const double closed = inverse_modulus(pair, d, 1.2);
    const double oracle = modulus_oracle(pair, d, 1.2);
    CHECK(closed > 0.0);
    CHECK(rel_err(closed, oracle) <= 1e-6);
    // round trip through the forward modulus
    CHECK(std::abs(forward_modulus(pair, d, closed).b - 1.2) <= 1e-8);
  }
}

TEST_CASE("forward modulus at the origin is the identity")
{
  const Design origin = Design::homoskedastic(2, {0.0, 0.0});
  const ModulusSolution s = forward_modulus(three_point_pair(), origin, 1.959964);
  CHECK(s.b == doctest::Approx(1.959964).epsilon(1e-12));
  CHECK(s.omega_prime == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(omega_prime(s, origin) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.active_count() == 1);
}

TEST_CASE("small-delta limit is the smallest penalty")
{
  Engine rng = make_engine(21, 0, 0);
  for (int t = 0; t < 20; ++t) {
    const RandomInstance inst = random_instance(rng);
    const ModulusProblem prob(OrderedPair{inst.small, inst.large}, inst.design);
    const double b = prob.solve(1e-9).b;
    CHECK(std::abs(b - prob.b_min()) <= 1e-6 * std::max(1.0, prob.b_min()));
  }
}

TEST_CASE("omega' matches a central finite difference")
{
  const Design d = three_point_design();
  const ModulusProblem prob(three_point_pair(), d);
  for (double delta : {0.3, 0.702099512286, 1.5, 4.0}) {
    const double h = 1e-5 * delta;
    const double fd = (prob.omega(delta + h) - prob.omega(delta - h)) / (2.0 * h);
    CHECK(rel_err(prob.solve(delta).omega_prime, fd) <= 1e-4);
  }
}

TEST_CASE("omega' scales with the noise variance at fixed hinge weights")
{
  const Design d = three_point_design();
  const ModulusSolution s = forward_modulus(three_point_pair(), d, 1.0);
  const Design scaled = Design::homoskedastic(2, d.coords(), 3.0);
  CHECK(omega_prime(s, scaled) == doctest::Approx(9.0 * omega_prime(s, d)).epsilon(1e-14));
  ModulusSolution zero = s;
  std::fill(zero.D.begin(), zero.D.end(), 0.0);
  CHECK_THROWS_AS(omega_prime(zero, d), DegenerateModulus);
}

TEST_CASE("QP oracle trivial cases")
{
  const Design origin = Design::homoskedastic(2, {0.0, 0.0});
  CHECK(modulus_oracle(three_point_pair(), origin, 0.8) == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(modulus_oracle(three_point_pair(), three_point_design(), 0.0) == doctest::Approx(0.0));
}

TEST_CASE("closed form agrees with the QP oracle on random instances")
{
  Engine rng = make_engine(22, 0, 0);
  for (int t = 0; t < 20; ++t) {
    const RandomInstance inst = random_instance(rng);
    const OrderedPair fwd{inst.small, inst.large};
    const OrderedPair bwd{inst.large, inst.small};
    for (const OrderedPair& pair : {fwd, bwd}) {
      const ModulusProblem prob(pair, inst.design);
      const double b = prob.b_min() + uniform(rng, 0.05, 1.5);
      const double closed = prob.inverse(b);
      const double oracle = modulus_oracle(pair, inst.design, b);
      CHECK(rel_err(closed, oracle) <= 1e-6);
    }
  }
}

TEST_CASE("inverse modulus is nondecreasing and convex in b")
{
  Engine rng = make_engine(23, 0, 0);
  for (int t = 0; t < 30; ++t) {
    const RandomInstance inst = random_instance(rng);
    const ModulusProblem prob(OrderedPair{inst.small, inst.large}, inst.design);
    double prev = -1.0;
    std::vector<double> vals;
    for (int i = 0; i <= 40; ++i) {
      const double v = prob.inverse(0.1 * i);
      CHECK(v >= prev);
      if (0.1 * i > prob.b_min() + 1e-12 && prev >= 0.0 && 0.1 * (i - 1) >= prob.b_min())
        CHECK(v > prev);
      prev = v;
      vals.push_back(v);
    }
    for (std::size_t i = 1; i + 1 < vals.size(); ++i)
      CHECK(vals[i] <= 0.5 * (vals[i - 1] + vals[i + 1]) + 1e-12);
  }
}

TEST_CASE("round trip, binding constraint and extremal feasibility")
{
  Engine rng = make_engine(24, 0, 0);
  for (int t = 0; t < 40; ++t) {
    const RandomInstance inst = random_instance(rng);
    for (const OrderedPair& pair : {OrderedPair{inst.small, inst.large}, OrderedPair{inst.large, inst.small}}) {
      const ModulusProblem prob(pair, inst.design);
      const double b = prob.b_min() + uniform(rng, 0.01, 2.0);
      const double delta = prob.inverse(b);
      const ModulusSolution s = prob.solve(delta);
      CHECK(std::abs(s.b - b) <= 1e-8 * std::max(1.0, b));
      double ss = 0.0;
      for (std::size_t i = 0; i < inst.design.n(); ++i) {
        const double diff = (s.f_to[i] - s.f_from[i]) / inst.design.sigma(i);
        ss += diff * diff;
        CHECK(s.f_to[i] >= s.f_from[i]);
        CHECK(s.D[i] >= 0.0);
      }
      CHECK(std::abs(ss - delta * delta) <= 1e-9 * delta * delta);
      CHECK(s.omega_prime > 0.0);
      CHECK(membership_feasible(pair.from, with_origin(inst.design, s.f_from, 0.0)));
      CHECK(membership_feasible(pair.to, with_origin(inst.design, s.f_to, s.b)));
    }
  }
}

TEST_CASE("larger target class never decreases the modulus")
{
  Engine rng = make_engine(25, 0, 0);
  for (int t = 0; t < 30; ++t) {
    const RandomInstance inst = random_instance(rng);
    const HolderClass bigger_c(inst.large.gamma(), inst.large.C() * 1.5, inst.large.v(), inst.large.norm());
    const HolderClass smaller_g(inst.large.gamma() * 0.7, inst.large.C(), inst.large.v(), inst.large.norm());
    const double delta = uniform(rng, 0.2, 3.0);
    const double base = ModulusProblem({inst.small, inst.large}, inst.design).omega(delta);
    CHECK(ModulusProblem({inst.small, bigger_c}, inst.design).omega(delta) >= base - 1e-12);
    // shrinking gamma enlarges the class only on sets of diameter at most 1
    const bool unit = [&] {
      for (std::size_t i = 0; i < inst.design.n(); ++i)
        if (inst.large.norm()(inst.design.point(i)) > 1.0)
          return false;
      return true;
    }();
    if (unit)
      CHECK(ModulusProblem({inst.small, smaller_g}, inst.design).omega(delta) >= base - 1e-12);
  }
}

TEST_CASE("monotone-only variant")
{
  const HolderClass partial(1.0, 1.0, IndexSet::from_one_based(2, {1}), MonotoneNorm::lp(2.0, 2));
  Engine rng = make_engine(26, 0, 0);
  std::vector<double> coords(2 * 30);
  for (double& c : coords)
    c = uniform(rng, -0.5, 0.5);
  const Design generic = Design::homoskedastic(2, coords);
  CHECK(inverse_modulus_monotone_only(partial, generic, 1.0) == 0.0);
  CHECK(inverse_modulus_monotone_only(partial, generic, 1.0, MonotoneOnlyDirection::monotone_to_holder) == 0.0);
  CHECK(inverse_modulus_monotone_only(lipschitz(1.0), generic, 0.0) == 0.0);

  // four points, two of them in the open positive orthant
  const Design four = Design::homoskedastic(2, {0.2, 0.3, 0.5, 0.1, -0.2, 0.4, -0.1, -0.3});
  for (auto dir : {MonotoneOnlyDirection::holder_to_monotone, MonotoneOnlyDirection::monotone_to_holder}) {
    const double closed = inverse_modulus_monotone_only(lipschitz(1.0), four, 0.9, dir);
    const double oracle = modulus_oracle_monotone_only(lipschitz(1.0), four, 0.9, dir);
    CHECK(closed > 0.0);
    CHECK(rel_err(closed, oracle) <= 1e-6);
  }
}
