#pragma once

#include "adaptci/design.hpp"
#include "adaptci/geometry.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace adaptci {

//! t^gamma for t >= 0 and gamma in (0, 1]. Very small exponents go through the
//! log domain so the 1e-3 classes neither underflow nor lose digits.
double holder_power(double t, double gamma);

//! The coordinate-wise monotone Hoelder class: functions with
//! |f(x) - f(z)| <= C ||x - z||^gamma that are nondecreasing in every coordinate of V.
class HolderClass {
public:
  HolderClass(double gamma, double C, IndexSet v, MonotoneNorm norm);

  double gamma() const { return gamma_; }
  double C() const { return C_; }
  const IndexSet& v() const { return v_; }
  const MonotoneNorm& norm() const { return norm_; }
  std::size_t dim() const { return v_.dim(); }

  // C t^gamma
  double penalty(double t) const { return C_ * holder_power(t, gamma_); }

  // Sufficient condition for `other` being a subset of this class on a set of
  // diameter <= 1: same geometry, smaller-or-equal exponent, larger-or-equal constant.
  bool dominates(const HolderClass& other) const;
  bool same_geometry(const HolderClass& other) const;

  friend bool operator==(const HolderClass&, const HolderClass&) = default;

private:
  double gamma_;
  double C_;
  IndexSet v_;
  MonotoneNorm norm_;
};

//! F_1, ..., F_J listed smallest class first; F_J is the class coverage is required over.
class ClassLadder {
public:
  explicit ClassLadder(std::vector<HolderClass> levels);

  std::size_t size() const { return levels_.size(); }
  const HolderClass& level(std::size_t j) const { return levels_.at(j); }
  const HolderClass& largest() const { return levels_.back(); }
  const std::vector<HolderClass>& levels() const { return levels_; }
  const MonotoneNorm& norm() const { return levels_.front().norm(); }
  const IndexSet& v() const { return levels_.front().v(); }

private:
  std::vector<HolderClass> levels_;
};

// Pointwise max / min over the class members with f(0) = f0 (attained envelopes).
double envelope_upper(const HolderClass& cls, double f0, std::span<const double> x);
double envelope_lower(const HolderClass& cls, double f0, std::span<const double> x);

struct NestingReport {
  static constexpr std::size_t origin = std::numeric_limits<std::size_t>::max();

  bool ok = true;
  double max_violation = 0.0; // max of C_j d^gamma_j - C_J d^gamma_J over violating pairs
  std::size_t level = 0;      // ladder index j of the worst violation
  std::size_t first = origin; // witness pair; `origin` denotes the query point 0
  std::size_t second = origin;
  double distance = 0.0;
};

//! Checks C_j ||x - z||^gamma_j <= C_J ||x - z||^gamma_J over all pairs drawn from
//! the design points and the origin, for every j < J.
NestingReport check_nesting(const ClassLadder& ladder, const Design& design);

struct PointValue {
  std::vector<double> x;
  double value;
};

//! True iff the values extend to a member of the class on all of R^k. On a finite
//! set this is exactly f(a) - f(b) <= C ||(a - b)_{V+}||^gamma for every ordered
//! pair, which implies both the Hoelder bound and monotonicity along V.
bool membership_feasible(const HolderClass& cls, std::span<const PointValue> points,
                         double tol = 1e-9);

//! C = 2 max_{i,j} |y_j - y_i| / ||x_j - x_i||^gamma over distinct design points.
double conservative_c(const Design& design, std::span<const double> y, double gamma,
                      const MonotoneNorm& norm);

} // namespace adaptci
