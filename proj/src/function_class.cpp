#include "adaptci/function_class.hpp"

#include "adaptci/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adaptci {

double holder_power(double t, double gamma)
{
  if (t <= 0.0)
    return 0.0;
  if (gamma == 1.0)
    return t;
  if (gamma < 0.05)
    return std::exp(gamma * std::log(t));
  return std::pow(t, gamma);
}

HolderClass::HolderClass(double gamma, double C, IndexSet v, MonotoneNorm norm)
    : gamma_(gamma), C_(C), v_(std::move(v)), norm_(std::move(norm))
{
  if (!(gamma_ > 0.0 && gamma_ <= 1.0))
    throw ValidationError("Hoelder exponent must lie in (0, 1], got " + std::to_string(gamma_));
  if (!(C_ >= 0.0) || !std::isfinite(C_))
    throw ValidationError("Hoelder constant must be finite and >= 0");
  if (v_.dim() != norm_.dim())
    throw ValidationError("monotone index set and norm have different dimensions");
}

bool HolderClass::same_geometry(const HolderClass& other) const
{
  return v_ == other.v_ && norm_ == other.norm_;
}

bool HolderClass::dominates(const HolderClass& other) const
{
  return same_geometry(other) && gamma_ <= other.gamma_ && C_ >= other.C_;
}

ClassLadder::ClassLadder(std::vector<HolderClass> levels) : levels_(std::move(levels))
{
  if (levels_.empty())
    throw ValidationError("class ladder needs at least one level");
  for (std::size_t j = 1; j < levels_.size(); ++j) {
    const auto& prev = levels_[j - 1];
    const auto& cur = levels_[j];
    if (!prev.same_geometry(cur))
      throw ValidationError("all ladder levels must share the norm and monotone coordinates");
    if (cur.gamma() > prev.gamma() || cur.C() < prev.C())
      throw ValidationError("ladder levels must have nonincreasing gamma and nondecreasing C "
                            "(smallest class first); level " +
                            std::to_string(j + 1) + " breaks the order");
  }
}

double envelope_upper(const HolderClass& cls, double f0, std::span<const double> x)
{
  return f0 + cls.penalty(norm_plus(cls.norm(), cls.v(), x));
}

double envelope_lower(const HolderClass& cls, double f0, std::span<const double> x)
{
  return f0 - cls.penalty(norm_minus(cls.norm(), cls.v(), x));
}

NestingReport check_nesting(const ClassLadder& ladder, const Design& design)
{
  if (design.k() != ladder.norm().dim())
    throw ValidationError("ladder dimension does not match the design");

  // Violations only grow with distance past the crossing point, so the diameter
  // pair (origin included) is the worst witness for every level.
  const auto& norm = ladder.norm();
  const std::size_t n = design.n();
  const std::size_t k = design.k();
  std::vector<double> diff(k);
  double diam = 0.0;
  std::size_t wa = NestingReport::origin;
  std::size_t wb = NestingReport::origin;
  for (std::size_t a = 0; a < n; ++a) {
    const double d0 = norm(design.point(a));
    if (d0 > diam) {
      diam = d0;
      wa = NestingReport::origin;
      wb = a;
    }
    auto pa = design.point(a);
    for (std::size_t b = a + 1; b < n; ++b) {
      auto pb = design.point(b);
      for (std::size_t c = 0; c < k; ++c)
        diff[c] = pa[c] - pb[c];
      const double d = norm(diff);
      if (d > diam) {
        diam = d;
        wa = a;
        wb = b;
      }
    }
  }

  NestingReport report;
  const auto& big = ladder.largest();
  for (std::size_t j = 0; j + 1 < ladder.size(); ++j) {
    const auto& cls = ladder.level(j);
    const double excess = cls.penalty(diam) - big.penalty(diam);
    if (excess > 1e-12 * std::max(1.0, big.penalty(diam)) && excess > report.max_violation) {
      report.ok = false;
      report.max_violation = excess;
      report.level = j;
      report.first = wa;
      report.second = wb;
      report.distance = diam;
    }
  }
  return report;
}

bool membership_feasible(const HolderClass& cls, std::span<const PointValue> points, double tol)
{
  const std::size_t k = cls.dim();
  for (const auto& p : points)
    if (p.x.size() != k)
      throw ValidationError("point dimension does not match the class");

  std::vector<double> diff(k);
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = 0; b < points.size(); ++b) {
      if (a == b)
        continue;
      const auto& pa = points[a];
      const auto& pb = points[b];
      for (std::size_t c = 0; c < k; ++c)
        diff[c] = pa.x[c] - pb.x[c];
      const double scale = tol * (1.0 + std::abs(pa.value) + std::abs(pb.value));
      if (std::all_of(diff.begin(), diff.end(), [](double d) { return d == 0.0; })) {
        if (std::abs(pa.value - pb.value) > scale)
          throw ValidationError("duplicate point carries conflicting values");
        continue;
      }
      const double bound = cls.penalty(norm_plus(cls.norm(), cls.v(), diff));
      if (pa.value - pb.value > bound + scale)
        return false;
    }
  }
  return true;
}

double conservative_c(const Design& design, std::span<const double> y, double gamma,
                      const MonotoneNorm& norm)
{
  if (y.size() != design.n())
    throw ValidationError("response length does not match the design");
  const std::size_t k = design.k();
  std::vector<double> diff(k);
  double best = 0.0;
  for (std::size_t a = 0; a < design.n(); ++a) {
    auto pa = design.point(a);
    for (std::size_t b = a + 1; b < design.n(); ++b) {
      auto pb = design.point(b);
      for (std::size_t c = 0; c < k; ++c)
        diff[c] = pa[c] - pb[c];
      const double d = norm(diff);
      if (d == 0.0)
        continue;
      best = std::max(best, std::abs(y[a] - y[b]) / holder_power(d, gamma));
    }
  }
  return 2.0 * best;
}

} // namespace adaptci
