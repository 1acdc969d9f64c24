#pragma once

#include "adaptci/design.hpp"
#include "adaptci/function_class.hpp"

#include <cstddef>
#include <vector>

namespace adaptci {

//! Ordered modulus omega(delta, from, to) = sup { f_to(0) - f_from(0) } over
//! f_from in `from`, f_to in `to` with sum(((f_to - f_from)(x_i) / sigma_i)^2) <= delta^2.
//! The two classes must share geometry and be ordered (one dominates the other).
struct OrderedPair {
  HolderClass from;
  HolderClass to;
};

//! Which class carries the max/min construction of the extremal pair.
enum class ExtremalForm {
  from_inside_to, // f_from = C_from ||x+||^g_from, f_to = max(b - C_to ||x-||^g_to, f_from)
  to_inside_from  // f_to = b - C_to ||x-||^g_to,   f_from = min(f_to, C_from ||x+||^g_from)
};

struct ModulusSolution {
  double b = 0.0;           // omega(delta) = f_to(0) - f_from(0)
  double delta = 0.0;
  double omega_prime = 0.0; // delta / sum(D_i / sigma_i^2)
  std::vector<double> f_from; // extremal function values at the design points
  std::vector<double> f_to;
  std::vector<double> D;      // hinge weights f_to - f_from >= 0
  ExtremalForm form = ExtremalForm::from_inside_to;

  std::size_t active_count() const;
};

//! Precomputed per-point penalties for one ordered pair on one design; every
//! forward / inverse evaluation is then O(n) without any power calls.
class ModulusProblem {
public:
  ModulusProblem(const OrderedPair& pair, const Design& design);
  ModulusProblem(const OrderedPair& pair, const Design& design, const ProjectedNorms& norms);

  // sqrt(sum(((b - a_i)_+ / sigma_i)^2)) with a_i = C_from ||x_i+||^g_from + C_to ||x_i-||^g_to
  double inverse(double b) const;
  // b_min = min_i a_i; inverse(b) = 0 for b <= b_min
  double b_min() const { return b_min_; }
  // b with inverse(b) = delta, plus the extremal functions and hinge weights
  ModulusSolution solve(double delta) const;
  double omega(double delta) const { return solve_b(delta); }

  ExtremalForm form() const { return form_; }
  std::size_t n() const { return sigma_.size(); }
  // 1 / sigma_i^2
  const std::vector<double>& precision() const { return w_; }

private:
  void init(const OrderedPair& pair, const Design& design, const ProjectedNorms& norms);
  double solve_b(double delta) const;
  double sum_sq_hinge(double b) const;
  double sum_hinge(double b) const;

  ExtremalForm form_ = ExtremalForm::from_inside_to;
  std::vector<double> from_pen_; // C_from ||x_i+||^g_from
  std::vector<double> to_pen_;   // C_to ||x_i-||^g_to
  std::vector<double> a_;        // from_pen_ + to_pen_
  std::vector<double> w_;        // 1 / sigma_i^2
  std::vector<double> sigma_;
  double b_min_ = 0.0;
};

double inverse_modulus(const OrderedPair& pair, const Design& design, double b);
ModulusSolution forward_modulus(const OrderedPair& pair, const Design& design, double delta);
double omega_prime(const ModulusSolution& solution, const Design& design);

enum class MonotoneOnlyDirection {
  holder_to_monotone, // omega^{-1}(b, Lambda(gamma, C), pure monotone class)
  monotone_to_holder  // omega^{-1}(b, pure monotone class, Lambda(gamma, C))
};

//! Inverse modulus between a monotone Hoelder class and the class of all
//! functions that are merely nondecreasing along V. Only points in the closed
//! cone {x_j = 0 off V, x_j >= 0 on V} (resp. <= 0) carry a hinge, so the value is
//! 0 on a generic design whenever V is a strict subset of the coordinates.
double inverse_modulus_monotone_only(const HolderClass& cls, const Design& design, double b,
                                     MonotoneOnlyDirection direction =
                                         MonotoneOnlyDirection::holder_to_monotone);

} // namespace adaptci
