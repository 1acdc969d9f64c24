#pragma once

#include "adaptci/geometry.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace adaptci {

//! Evaluation points x_1..x_n in R^k, already translated so the point of
//! interest is the origin, with known noise standard deviations sigma_i.
class Design {
public:
  Design(std::size_t k, std::vector<double> coords, std::vector<double> sigma);

  // every point gets the same noise sd
  static Design homoskedastic(std::size_t k, std::vector<double> coords, double sigma = 1.0);

  std::size_t n() const { return sigma_.size(); }
  std::size_t k() const { return k_; }
  std::span<const double> point(std::size_t i) const
  {
    return {coords_.data() + i * k_, k_};
  }
  const std::vector<double>& coords() const { return coords_; }
  const std::vector<double>& sigma() const { return sigma_; }
  double sigma(std::size_t i) const { return sigma_[i]; }

  // x -> -x; the monotone class is invariant under f(x) -> -f(-x)
  Design reflected() const;
  Design subset(const std::vector<std::size_t>& rows) const;

private:
  std::size_t k_;
  std::vector<double> coords_;
  std::vector<double> sigma_;
};

//! ||(x_i)_{V+}|| and ||(x_i)_{V-}|| for every design point. These are shared by
//! every class of a ladder, so they are computed once per (design, norm, V).
struct ProjectedNorms {
  std::vector<double> plus;
  std::vector<double> minus;
};

ProjectedNorms projected_norms(const Design& design, const MonotoneNorm& norm, const IndexSet& v);

} // namespace adaptci
