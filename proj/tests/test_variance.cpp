#include "adaptci/errors.hpp"
#include "adaptci/variance.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace adaptci;
using namespace adaptci::testing;

TEST_CASE("four-point hand instance")
{
  // reference values from a direct dense-matrix computation of L, tr(L), tr(L'L)
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0}, y{0.0, 1.0, 0.0, 1.0};
  const VarianceEstimate e = estimate_sigma2(1, x, y, 1.0);
  CHECK(e.trace.nu1 == doctest::Approx(1.9925625266792326).epsilon(1e-12));
  CHECK(e.trace.nu2 == doctest::Approx(1.5383948374233811).epsilon(1e-12));
  CHECK(e.sigma2 == doctest::Approx(0.5034085715880814).epsilon(1e-12));
  CHECK(e.trace.bandwidth == 1.0);
}

TEST_CASE("constant data has zero residual variance")
{
  const std::vector<double> x{0.0, 0.3, 1.1, 2.0, 2.5}, y(5, 4.2);
  CHECK(estimate_sigma2(1, x, y, 0.7).sigma2 == doctest::Approx(0.0).epsilon(1e-24));
}

TEST_CASE("tiny bandwidth makes the smoother the identity")
{
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0}, y{0.0, 1.0, 0.0, 1.0};
  CHECK_THROWS_AS(estimate_sigma2(1, x, y, 1e-3), DegenerateDOF);
}

TEST_CASE("input validation")
{
  CHECK_THROWS_AS(estimate_sigma2(1, std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0}, 1.0),
                  ValidationError);
  CHECK_THROWS_AS(estimate_sigma2(1, std::vector<double>{0.0, 1.0, 2.0},
                                  std::vector<double>{0.0, std::nan(""), 1.0}, 1.0),
                  ValidationError);
  CHECK_THROWS_AS(estimate_sigma2(1, std::vector<double>{0.0, 1.0, 2.0}, std::vector<double>{0.0, 1.0, 1.0}, 0.0),
                  ValidationError);
}

TEST_CASE("shift invariance, nonnegativity and thread independence")
{
  Engine rng = make_engine(61, 0, 0);
  std::vector<double> x(2 * 300), y(300), shifted(300);
  for (double& c : x)
    c = uniform(rng, -1, 1);
  const auto u = draw_normals(rng, 300);
  for (std::size_t i = 0; i < 300; ++i) {
    y[i] = x[2 * i] + u[i];
    shifted[i] = y[i] + 17.0;
  }
  const double h = default_bandwidth(2, x);
  const VarianceEstimate a = estimate_sigma2(2, x, y, h, 1);
  CHECK(a.sigma2 >= 0.0);
  CHECK(estimate_sigma2(2, x, shifted, h).sigma2 == doctest::Approx(a.sigma2).epsilon(1e-9));
  CHECK(estimate_sigma2(2, x, y, h, 4).sigma2 == a.sigma2);
}

TEST_CASE("mean estimate is close to the noise variance at n = 1000")
{
  const double sigma2 = 0.25;
  double total = 0.0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    Engine rng = make_engine(62, 0, r);
    std::vector<double> x(2 * 1000), y(1000);
    for (double& c : x)
      c = uniform(rng, -0.5, 0.5);
    const auto u = draw_normals(rng, 1000);
    for (std::size_t i = 0; i < 1000; ++i)
      y[i] = std::sin(2 * x[2 * i]) + x[2 * i + 1] + std::sqrt(sigma2) * u[i];
    total += estimate_sigma2(2, x, y, default_bandwidth(2, x), 4).sigma2;
  }
  CHECK(std::abs(total / reps - sigma2) <= 0.1 * sigma2);
}
