#include "adaptci/errors.hpp"
#include "adaptci/io.hpp"
#include "adaptci/simulate.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace adaptci;
using namespace adaptci::testing;

TEST_CASE("simulation truths")
{
  CHECK(truth_eval(Truth::f1, std::vector<double>{0.3, -0.2}) == 0.0);
  CHECK(truth_eval(Truth::f2, std::vector<double>{-1.0, -1.0}, 1e-3) == 0.0);
  CHECK(truth_eval(Truth::f3, std::vector<double>{0.25, 0.0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(truth_eval(Truth::f2, std::vector<double>{0.3, 0.4}, 0.5) == doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS(truth_eval(Truth::f1, std::vector<double>{0.0}), ValidationError);
}

TEST_CASE("uniform design lies in the square")
{
  const auto x = draw_uniform_design(500, 0.35355339059327373, 1, 2, 3);
  CHECK(x.size() == 1000);
  CHECK(*std::max_element(x.begin(), x.end()) <= 0.35355339059327373);
  CHECK(*std::min_element(x.begin(), x.end()) >= -0.35355339059327373);
  CHECK(draw_uniform_design(500, 0.35355339059327373, 1, 2, 3) == x);
}

TEST_CASE("scenario reports are deterministic across runs and thread counts")
{
  Scenario s = table_scenarios(1, {60}, 30, 7).front();
  s.calibrated = true;
  s.mc_draws = 10000;
  s.threads = 1;
  const std::string a = to_json(run_scenario(s)).dump();
  CHECK(to_json(run_scenario(s)).dump() == a);
  s.threads = 4;
  CHECK(to_json(run_scenario(s)).dump() == a);
  const SimReport r = sim_report_from_json(json::parse(a));
  CHECK(to_json(r).dump() == a);
}

TEST_CASE("table scenarios and report formats")
{
  const auto t1 = table_scenarios(1, {100}, 20, 3);
  REQUIRE(t1.size() == 1);
  CHECK(t1.front().truth == Truth::f1);
  CHECK(t1.front().minimax.size() == 2);
  const auto t3 = table_scenarios(3, {100, 500}, 20, 3);
  CHECK(t3.size() == 4);
  const auto t4 = table_scenarios(4, {100}, 20, 3);
  CHECK(t4.front().ladder.size() == 6);
  CHECK_THROWS_AS(table_scenarios(5, {100}, 20, 3), ValidationError);

  std::vector<SimReport> reports{run_scenario(t1.front())};
  const std::string md = reports_markdown(1, reports);
  CHECK(md.find("| n = 100 |") != std::string::npos);
  const std::string csv = reports_csv(reports);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(reports.front().methods.size()));
  for (const auto& m : reports.front().methods) {
    CHECK(m.coverage >= 0.0);
    CHECK(m.coverage <= 1.0);
    CHECK(m.se_coverage == doctest::Approx(std::sqrt(m.coverage * (1 - m.coverage) / 20)).epsilon(1e-9));
  }
}

TEST_CASE("rate exponent")
{
  CHECK(rate_exponent(2, 2, 1.0, 1.0) == 0.25);
  CHECK(rate_exponent(2, 2, 1.0, 0.3) == 0.25);
  CHECK(rate_exponent(2, 0, 1.0, 0.5) == doctest::Approx(1.0 / (2.0 + 2.0 / 0.5)));
  CHECK_THROWS_AS(rate_exponent(2, 3, 1.0, 1.0), ValidationError);
}

TEST_CASE("empirical rate of the between-class modulus")
{
  RateCheckConfig cfg;
  const RateCheckResult r = rate_check(cfg);
  CHECK(r.theory == -0.25);
  CHECK(r.relative_error <= 0.15);
  for (std::size_t i = 1; i < r.omega.size(); ++i)
    CHECK(r.omega[i] < r.omega[i - 1]);
  cfg.ns = {100, 1000};
  CHECK_THROWS_AS(rate_check(cfg), ValidationError);
}

TEST_CASE("length ordering under f1 at n = 500")
{
  Scenario s = table_scenarios(1, {500}, 60, 11).front();
  const SimReport r = run_scenario(s);
  const double bon = r.method("bonferroni").mean_length;
  CHECK(r.method("minimax_oracle").mean_length < bon);
  CHECK(bon < r.method("minimax_conservative").mean_length);
}

TEST_CASE("stand-in production data and workflow")
{
  const ProductionData d = production_stand_in(1636, 2001);
  CHECK(d.y.size() == 1636);
  CHECK(d.x.size() == 2 * 1636);
  const StandInOutcome o = run_stand_in(1636, 2001, 0.05, 20000);
  CHECK(o.n_eff >= 3);
  CHECK(o.tau_star >= 0.05 / 12.0);
  CHECK(o.calibrated.length() <= o.naive.length());
  CHECK(o.naive.length() < o.conservative.length());
}
