#pragma once

#include <cstddef>
#include <span>

namespace adaptci {

struct SmootherTrace {
  double nu1 = 0.0;       // tr(L)
  double nu2 = 0.0;       // tr(L'L)
  double bandwidth = 0.0;
};

struct VarianceEstimate {
  double sigma2 = 0.0;
  SmootherTrace trace;
};

//! h = n^{-1/(k+4)} times the geometric mean of the coordinate standard deviations.
double default_bandwidth(std::size_t k, std::span<const double> coords);

//! sigma2-hat = sum (y - L y)^2 / (n - 2 nu1 + nu2), where L is the row-normalized
//! Gaussian-kernel (Nadaraya-Watson) smoother matrix with bandwidth h. Coordinates
//! are row-major n x k. Throws DegenerateDOF when the denominator is <= 1e-8 n.
VarianceEstimate estimate_sigma2(std::size_t k, std::span<const double> coords,
                                 std::span<const double> y, double bandwidth,
                                 unsigned threads = 1);

} // namespace adaptci
