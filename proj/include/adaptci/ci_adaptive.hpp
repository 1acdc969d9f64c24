#pragma once

#include "adaptci/ci_onesided.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace adaptci {

enum class CiMethod { bonferroni, calibrated, onesided_lower, onesided_upper };

const char* method_name(CiMethod m);

struct AdaptiveCI {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<OneSidedBound> per_level_bounds; // lower bounds of all levels, then upper bounds
  double tau = 0.0;                            // per-bound level actually used
  CiMethod method = CiMethod::bonferroni;
  std::uint64_t seed = 0;     // calibration metadata, calibrated only
  std::size_t mc_draws = 0;
  bool empty = false;         // crossed bounds; counts as a miss
  std::vector<std::size_t> skipped_levels;
  std::vector<std::string> diagnostics;

  double length() const;
  bool covers(double value) const;
};

//! Intersection over all levels of [c-hat^{l,j}_tau, c-hat^{u,j}_tau]. For the
//! one-sided methods only the requested side is formed; the other end is infinite.
AdaptiveCI interval_at_level(const LadderModuli& moduli, std::span<const double> y, double tau,
                             CiMethod method);

AdaptiveCI bonferroni_ci(const Design& design, std::span<const double> y,
                         const ClassLadder& ladder, double alpha);
AdaptiveCI bonferroni_ci(const LadderModuli& moduli, std::span<const double> y, double alpha);

//! 2 z_{1 - alpha/2J} / z_{1 - alpha/2}
double adaptivity_constant(double alpha, std::size_t J);

//! Correlation matrix of (V_1..V_J, W_1..W_J) at delta = z_{1-tau}, where V_j is the
//! standardized noise of the level-j lower estimator and W_j the negated noise of
//! the level-j upper estimator.
struct CalibrationCov {
  Eigen::MatrixXd Sigma;
  double tau = 0.0;
};

CalibrationCov calibration_cov(const LadderModuli& moduli, double tau);
CalibrationCov calibration_cov(const Design& design, const ClassLadder& ladder, double tau);

//! Fixed matrix of iid N(0,1) draws (common random numbers) used to estimate
//! P(max_k Z_k > c) for Z ~ N(0, Sigma) at many Sigma and c.
class GaussianMaxSampler {
public:
  GaussianMaxSampler(std::size_t dim, std::size_t draws, std::uint64_t seed, unsigned threads = 1);

  struct Estimate {
    double probability = 0.0;
    bool repaired = false;      // negative eigenvalues were clipped
    bool repair_failed = false; // min eigenvalue below -1e-6; probability unset
    double min_eigenvalue = 0.0;
  };
  Estimate exceedance(const Eigen::MatrixXd& Sigma, double threshold) const;

  std::size_t dim() const { return dim_; }
  std::size_t draws() const { return draws_; }

private:
  std::size_t dim_;
  std::size_t draws_;
  unsigned threads_;
  Eigen::MatrixXd normals_; // dim x draws
};

struct TauStar {
  double tau = 0.0;
  double naive = 0.0;       // alpha / 2J
  double exceedance = 0.0;  // MC estimate at the returned tau
  bool fallback = false;
  std::size_t mc_draws = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

TauStar tau_star(const LadderModuli& moduli, double alpha, std::size_t mc_draws,
                 std::uint64_t seed, unsigned threads = 1);
TauStar tau_star(const Design& design, const ClassLadder& ladder, double alpha,
                 std::size_t mc_draws, std::uint64_t seed, unsigned threads = 1);

AdaptiveCI calibrated_ci(const LadderModuli& moduli, std::span<const double> y, double alpha,
                         std::size_t mc_draws, std::uint64_t seed, unsigned threads = 1);
AdaptiveCI calibrated_ci(const Design& design, std::span<const double> y,
                         const ClassLadder& ladder, double alpha, std::size_t mc_draws = 100000,
                         std::uint64_t seed = 42, unsigned threads = 1);

//! max_j c-hat^{l,j} at level alpha/J each; the upper version is the mirror image.
double adaptive_onesided_lower(const Design& design, std::span<const double> y,
                               const ClassLadder& ladder, double alpha);
double adaptive_onesided_upper(const Design& design, std::span<const double> y,
                               const ClassLadder& ladder, double alpha);

} // namespace adaptci
