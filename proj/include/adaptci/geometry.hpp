#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace adaptci {

//! Weighted l_p norm, ||z|| = ||(w_1 z_1, ..., w_k z_k)||_p with p in [1, inf].
//!
//! Every such norm is nondecreasing in each |z_j|, which is the property all
//! the envelope and modulus formulas rely on.
class MonotoneNorm {
public:
  static constexpr double infinity = std::numeric_limits<double>::infinity();

  MonotoneNorm(double p, std::vector<double> weights);

  // unweighted l_p on R^k
  static MonotoneNorm lp(double p, std::size_t k);

  double p() const { return p_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t dim() const { return weights_.size(); }

  double operator()(std::span<const double> z) const;

  friend bool operator==(const MonotoneNorm&, const MonotoneNorm&) = default;

private:
  double p_;
  std::vector<double> weights_;
};

double norm_eval(const MonotoneNorm& norm, std::span<const double> z);

//! Subset V of the coordinates {0, ..., k-1} along which functions are nondecreasing.
//! External interfaces are 1-based; see from_one_based.
class IndexSet {
public:
  IndexSet() = default;
  IndexSet(std::size_t k, const std::vector<std::size_t>& zero_based);

  static IndexSet from_one_based(std::size_t k, const std::vector<std::size_t>& one_based);
  static IndexSet all(std::size_t k);
  static IndexSet none(std::size_t k);

  std::size_t dim() const { return mask_.size(); }
  std::size_t size() const { return count_; }
  bool contains(std::size_t i) const { return mask_[i]; }
  bool is_full() const { return count_ == mask_.size(); }
  std::vector<std::size_t> indices() const;
  std::vector<std::size_t> one_based() const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
  std::vector<bool> mask_;
  std::size_t count_ = 0;
};

// (z)_{V+}: coordinates in V clipped at zero from below, others unchanged
std::vector<double> project_plus(const IndexSet& v, std::span<const double> z);
// (z)_{V-} = (-z)_{V+}
std::vector<double> project_minus(const IndexSet& v, std::span<const double> z);

// ||(z)_{V+}|| and ||(z)_{V-}|| without materializing the projections
double norm_plus(const MonotoneNorm& norm, const IndexSet& v, std::span<const double> z);
double norm_minus(const MonotoneNorm& norm, const IndexSet& v, std::span<const double> z);

} // namespace adaptci
