#include "adaptci/minimax_ci.hpp"

#include "adaptci/detail/sum.hpp"
#include "adaptci/errors.hpp"
#include "adaptci/normal.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>

namespace adaptci {

namespace {

constexpr int kCoarseGrid = 64;
constexpr double kGolden = 0.6180339887498949;

} // namespace

double cv_biased_normal(double t, double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("alpha must lie in (0, 1)");
  if (!(t >= 0.0) || !std::isfinite(t))
    throw ValidationError("cv_biased_normal needs a finite t >= 0");
  // P(|N(t,1)| > c) = Phi(-(c - t)) + Phi(-(c + t)), decreasing in c
  auto excess = [&](double c) { return normal_sf(c - t) + normal_sf(c + t) - alpha; };
  double lo = t + normal_upper_quantile(alpha);
  double hi = t + normal_upper_quantile(alpha / 2.0);
  if (t == 0.0)
    return hi;
  const double flo = excess(lo);
  const double fhi = excess(hi);
  if (flo <= 0.0)
    return lo;
  if (fhi >= 0.0)
    return hi;
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::max(1.0, std::abs(a)); };
  const auto r = boost::math::tools::toms748_solve(excess, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

MinimaxCI::MinimaxCI(const HolderClass& cls, const Design& design, double alpha,
                     std::size_t class_index)
    : problem_(OrderedPair{cls, cls}, design), alpha_(alpha), class_index_(class_index)
{
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("alpha must lie in (0, 1)");
  const double z = normal_upper_quantile(alpha);
  const double log_lo = std::log(1e-3 * z);
  const double log_hi = std::log(1e3 * z);

  auto objective = [&](double log_delta) { return half_length(std::exp(log_delta)); };

  // coarse scan guards the golden-section search against flat stretches
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> grid(kCoarseGrid);
  for (int g = 0; g < kCoarseGrid; ++g) {
    grid[g] = log_lo + (log_hi - log_lo) * g / (kCoarseGrid - 1);
    const double v = objective(grid[g]);
    if (v < best_val) {
      best_val = v;
      best = g;
    }
  }
  double a = grid[std::max(0, best - 1)];
  double b = grid[std::min(kCoarseGrid - 1, best + 1)];
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > 1e-10) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = objective(d);
    }
  }
  double log_opt = 0.5 * (a + b);
  double val = objective(log_opt);
  if (best_val < val) {
    log_opt = grid[best];
    val = best_val;
  }
  delta_opt_ = std::exp(log_opt);
  half_ = val;

  const ModulusSolution sol = problem_.solve(delta_opt_);
  omega_ = sol.b;
  omega_prime_ = sol.omega_prime;
  const std::vector<double>& prec = problem_.precision();
  detail::CompensatedSum total;
  for (std::size_t i = 0; i < sol.D.size(); ++i)
    total += sol.D[i] * prec[i];
  weight_.assign(sol.D.size(), 0.0);
  detail::CompensatedSum centering;
  for (std::size_t i = 0; i < sol.D.size(); ++i) {
    if (sol.D[i] <= 0.0)
      continue;
    weight_[i] = sol.D[i] * prec[i] / total.value();
    centering += weight_[i] * 0.5 * (sol.f_from[i] + sol.f_to[i]);
  }
  center_offset_ = 0.5 * omega_ - centering.value();
}

double MinimaxCI::half_length(double delta) const
{
  const ModulusSolution sol = problem_.solve(delta);
  const double t = std::max(0.0, 0.5 * (sol.b / sol.omega_prime - delta));
  return sol.omega_prime * cv_biased_normal(t, alpha_);
}

FixedLengthCI MinimaxCI::apply(std::span<const double> y) const
{
  if (y.size() != weight_.size())
    throw ValidationError("data length does not match the design");
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (weight_[i] != 0.0)
      s += weight_[i] * y[i];
  FixedLengthCI ci;
  ci.center = s.value() + center_offset_;
  ci.half_length = half_;
  ci.delta_opt = delta_opt_;
  ci.class_index = class_index_;
  ci.omega = omega_;
  ci.omega_prime = omega_prime_;
  return ci;
}

FixedLengthCI minimax_fixed_ci(const Design& design, std::span<const double> y,
                               const HolderClass& cls, double alpha, std::size_t class_index)
{
  return MinimaxCI(cls, design, alpha, class_index).apply(y);
}

} // namespace adaptci
