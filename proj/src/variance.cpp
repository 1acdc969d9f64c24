#include "adaptci/variance.hpp"

#include "adaptci/detail/sum.hpp"
#include "adaptci/errors.hpp"
#include "adaptci/parallel.hpp"

#include <cmath>
#include <vector>

namespace adaptci {

double default_bandwidth(std::size_t k, std::span<const double> coords)
{
  if (k == 0 || coords.empty() || coords.size() % k != 0)
    throw ValidationError("coordinates must be a nonempty n x k array");
  const std::size_t n = coords.size() / k;
  if (n < 2)
    throw ValidationError("default bandwidth needs at least two points");
  double log_sd = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      mean += coords[i * k + j];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = coords[i * k + j] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0))
      throw ValidationError("default bandwidth: coordinate " + std::to_string(j + 1) +
                            " has zero spread");
    log_sd += std::log(sd);
  }
  return std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(k) + 4.0)) *
         std::exp(log_sd / static_cast<double>(k));
}

VarianceEstimate estimate_sigma2(std::size_t k, std::span<const double> coords,
                                 std::span<const double> y, double bandwidth, unsigned threads)
{
  if (k == 0 || coords.size() % k != 0)
    throw ValidationError("coordinates must be an n x k array");
  const std::size_t n = coords.size() / k;
  if (y.size() != n)
    throw ValidationError("response length does not match the coordinates");
  if (n < 3)
    throw ValidationError("variance estimation needs n >= 3");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw ValidationError("bandwidth must be positive and finite");
  for (double v : coords)
    if (!std::isfinite(v))
      throw ValidationError("coordinates contain NaN or infinite values");
  for (double v : y)
    if (!std::isfinite(v))
      throw ValidationError("responses contain NaN or infinite values");

  const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  std::vector<double> diag(n), sq(n), resid2(n);
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> w(n);
    for (std::size_t l = 0; l < n; ++l) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double d = coords[i * k + j] - coords[l * k + j];
        d2 += d * d;
      }
      w[l] = std::exp(-d2 * inv2h2);
    }
    detail::CompensatedSum row;
    for (double v : w)
      row += v;
    const double total = row.value(); // >= 1 from the self term
    detail::CompensatedSum fit, ss;
    for (std::size_t l = 0; l < n; ++l) {
      const double L = w[l] / total;
      fit += L * y[l];
      ss += L * L;
    }
    diag[i] = w[i] / total;
    sq[i] = ss.value();
    const double r = y[i] - fit.value();
    resid2[i] = r * r;
  });

  detail::CompensatedSum nu1, nu2, rss;
  for (std::size_t i = 0; i < n; ++i) {
    nu1 += diag[i];
    nu2 += sq[i];
    rss += resid2[i];
  }
  VarianceEstimate est;
  est.trace.nu1 = nu1.value();
  est.trace.nu2 = nu2.value();
  est.trace.bandwidth = bandwidth;
  const double dof = static_cast<double>(n) - 2.0 * est.trace.nu1 + est.trace.nu2;
  if (!(dof > 1e-8 * static_cast<double>(n)))
    throw DegenerateDOF("smoother degrees of freedom n - 2 tr(L) + tr(L'L) vanish; bandwidth too small");
  est.sigma2 = rss.value() / dof;
  return est;
}

} // namespace adaptci
