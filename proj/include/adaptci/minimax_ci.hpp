#pragma once

#include "adaptci/design.hpp"
#include "adaptci/function_class.hpp"
#include "adaptci/modulus.hpp"

#include <cstddef>
#include <span>

namespace adaptci {

//! c with P(|N(t, 1)| <= c) = 1 - alpha.
double cv_biased_normal(double t, double alpha);

struct FixedLengthCI {
  double center = 0.0;
  double half_length = 0.0;
  double delta_opt = 0.0;
  std::size_t class_index = 0;
  double omega = 0.0;       // self-modulus at delta_opt
  double omega_prime = 0.0; // sd of the affine estimator

  double lower() const { return center - half_length; }
  double upper() const { return center + half_length; }
  double length() const { return 2.0 * half_length; }
  bool covers(double value) const { return lower() <= value && value <= upper(); }
};

//! Shortest fixed-length affine CI over one class: half_length(delta) =
//! omega'(delta) cv_alpha((omega(delta) / omega'(delta) - delta) / 2), minimized in log delta.
class MinimaxCI {
public:
  MinimaxCI(const HolderClass& cls, const Design& design, double alpha,
            std::size_t class_index = 0);

  double half_length(double delta) const;
  double delta_opt() const { return delta_opt_; }
  FixedLengthCI apply(std::span<const double> y) const;

private:
  ModulusProblem problem_;
  double alpha_;
  std::size_t class_index_;
  double delta_opt_ = 0.0;
  double half_ = 0.0;
  double omega_ = 0.0;
  double omega_prime_ = 0.0;
  std::vector<double> weight_;
  double center_offset_ = 0.0;
};

FixedLengthCI minimax_fixed_ci(const Design& design, std::span<const double> y,
                               const HolderClass& cls, double alpha, std::size_t class_index = 0);

} // namespace adaptci
