#pragma once

#include "adaptci/design.hpp"
#include "adaptci/function_class.hpp"
#include "adaptci/modulus.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace adaptci {

enum class Side { lower, upper };

struct OneSidedBound {
  double value = 0.0; // the bound c-hat
  Side side = Side::lower;
  double alpha = 0.0;
  double delta = 0.0;
  std::size_t level_index = 0; // ladder level j the bound directs power to (0-based)
  double estimator = 0.0;      // L-hat
  double sd = 0.0;             // omega'(delta)
  double max_bias_halfwidth = 0.0; // (omega - delta omega') / 2
  double omega = 0.0;
  std::size_t active_points = 0;
};

//! Modulus problems for every level of a ladder on one design:
//! lower(j) solves omega(delta, F_J, F_j) and upper(j) solves omega(delta, F_j, F_J).
class LadderModuli {
public:
  LadderModuli(const ClassLadder& ladder, const Design& design);

  std::size_t size() const { return lower_.size(); }
  const ModulusProblem& lower(std::size_t j) const { return lower_.at(j); }
  const ModulusProblem& upper(std::size_t j) const { return upper_.at(j); }
  const ModulusProblem& problem(Side side, std::size_t j) const
  {
    return side == Side::lower ? lower(j) : upper(j);
  }
  const ClassLadder& ladder() const { return ladder_; }
  std::size_t n() const { return n_; }

private:
  ClassLadder ladder_;
  std::size_t n_;
  std::vector<ModulusProblem> lower_;
  std::vector<ModulusProblem> upper_;
};

//! A one-sided bound is affine in the data: c-hat = sum_i weight_i y_i + intercept.
//! The rule depends only on the design, so it is built once and applied to many y.
struct OneSidedRule {
  Side side = Side::lower;
  std::size_t level_index = 0;
  double alpha = 0.0;
  double delta = 0.0;
  double omega = 0.0;
  double omega_prime = 0.0;
  std::vector<double> weight; // D_i / sigma_i^2 / sum(D / sigma^2)
  double center_offset = 0.0; // L-hat = sum weight_i y_i + center_offset
  double intercept = 0.0;     // c-hat = sum weight_i y_i + intercept
  std::size_t active_points = 0;

  double estimator(std::span<const double> y) const;
  double apply(std::span<const double> y) const;
  OneSidedBound bound(std::span<const double> y) const;
};

//! D_i = f_to(x_i) - f_from(x_i); throws AllZeroWeights if no point is active.
std::vector<double> hinge_weights(const ModulusSolution& solution, const Design& design);

OneSidedRule make_rule(const LadderModuli& moduli, Side side, std::size_t j, double alpha,
                       double beta = 0.5);

OneSidedBound lower_bound(const Design& design, std::span<const double> y,
                          const ClassLadder& ladder, std::size_t j, double alpha,
                          double beta = 0.5);
OneSidedBound upper_bound(const Design& design, std::span<const double> y,
                          const ClassLadder& ladder, std::size_t j, double alpha,
                          double beta = 0.5);

} // namespace adaptci
