#pragma once

#include "adaptci/ci_adaptive.hpp"
#include "adaptci/function_class.hpp"
#include "adaptci/minimax_ci.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adaptci {

enum class Truth { f1, f2, f3 };

const char* truth_name(Truth t);

//! f1 = 0, f2 = ||x_{V+}||_2^{gamma}, f3 = ||x_{V+}||_2^{1/2} with V = {1, 2}.
//! `gamma` is only used by f2 (the simulations take the largest class exponent).
double truth_eval(Truth which, std::span<const double> x, double gamma = 1e-3);

//! Simulation ladders on R^2 with V = {1, 2}, unweighted l2, C = 1:
//! gamma = (1, 1e-3) and gamma = (1, 0.8, 0.6, 0.4, 0.2, 1e-3).
ClassLadder two_level_ladder();
ClassLadder six_level_ladder();
HolderClass simulation_class(double gamma, double C = 1.0);

struct MinimaxSpec {
  std::string label;
  HolderClass cls;
};

struct Scenario {
  std::string name;
  Truth truth = Truth::f1;
  double truth_gamma = 1e-3;
  std::size_t n = 100;
  std::size_t reps = 500;
  double alpha = 0.05;
  ClassLadder ladder = two_level_ladder();
  bool bonferroni = true;
  bool calibrated = false;
  std::vector<MinimaxSpec> minimax;
  std::uint64_t seed = 42;
  std::size_t mc_draws = 20000;     // calibrated only
  std::size_t calibrated_reps = 0;  // 0: every replication
  double half_width = 0.35355339059327373; // design uniform on [-h, h]^2, h = 1/(2 sqrt 2)
  unsigned threads = 1;
};

struct MethodSummary {
  std::string label;
  std::size_t count = 0;    // replications where the method produced an interval
  std::size_t failures = 0;
  std::size_t empty = 0;    // crossed bounds (counted as misses with length 0)
  double mean_length = 0.0;
  double se_length = 0.0;
  double coverage = 0.0;
  double se_coverage = 0.0;
};

struct CalibrationSummary {
  std::size_t reps = 0;
  double min_tau = 0.0;
  double mean_tau = 0.0;
  double naive_tau = 0.0;
  std::size_t below_naive = 0;           // replications with tau* < alpha/2J
  std::size_t containment_violations = 0; // calibrated interval not inside the Bonferroni one
  double max_containment_excess = 0.0;
};

struct SimReport {
  std::string name;
  Truth truth = Truth::f1;
  std::size_t n = 0;
  std::size_t reps = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::vector<MethodSummary> methods;
  std::optional<CalibrationSummary> calibration;
  std::size_t failed_reps = 0; // every method failed
  double wall_seconds = 0.0;   // not part of serialized output

  const MethodSummary& method(const std::string& label) const;
};

//! Draws n points uniformly on [-h, h]^2 from the stream (seed, rep).
std::vector<double> draw_uniform_design(std::size_t n, double half_width, std::uint64_t seed,
                                        std::uint64_t purpose, std::uint64_t index);

SimReport run_scenario(const Scenario& s);

std::vector<Scenario> table_scenarios(int table, const std::vector<std::size_t>& ns,
                                      std::size_t reps, std::uint64_t seed);

std::string reports_markdown(int table, const std::vector<SimReport>& reports);
std::string reports_csv(const std::vector<SimReport>& reports);

struct RateCheckConfig {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double C1 = 1.0;
  double C2 = 2.0;
  std::vector<std::size_t> v_one_based{1, 2};
  std::vector<std::size_t> ns{100, 1000, 10000, 100000};
  double delta = 0.0; // 0 means z_{0.95}
  double half_width = 0.35355339059327373;
  std::uint64_t seed = 42;
};

struct RateCheckResult {
  std::vector<std::size_t> ns;
  std::vector<double> omega;   // between-class modulus max(omega(F1,F2), omega(F2,F1))
  double slope = 0.0;
  double theory = 0.0;         // -r
  double relative_error = 0.0; // |slope - theory| / |theory|
};

//! r = 1 / (2 + k_+/gamma1 + (k - k_+)/gamma2)
double rate_exponent(std::size_t k, std::size_t k_plus, double gamma1, double gamma2);
RateCheckResult rate_check(const RateCheckConfig& cfg);

//! Synthetic production data with the ranges of the log output / log fixed
//! asset / log labor summary table; y is increasing in both inputs.
struct ProductionData {
  std::vector<double> x; // n x 2 row-major (log fixed asset, log labor)
  std::vector<double> y; // log output
};
ProductionData production_stand_in(std::size_t n, std::uint64_t seed);

struct StandInOutcome {
  std::size_t n = 0;
  std::size_t n_eff = 0;
  double sigma2 = 0.0;
  double C = 0.0;
  double tau_star = 0.0;
  AdaptiveCI naive;
  AdaptiveCI calibrated;
  FixedLengthCI conservative;
  FixedLengthCI oracle;
};

//! Empirical workflow: x0 = medians, l2 norm weighted by inverse sds, kernel
//! variance estimate, support restricted to a ball of radius 0.5 so the ladder
//! nests, conservative C, then naive / calibrated / minimax intervals.
StandInOutcome run_stand_in(std::size_t n, std::uint64_t seed, double alpha,
                            std::size_t mc_draws, unsigned threads = 1);

} // namespace adaptci
