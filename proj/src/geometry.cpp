#include "adaptci/geometry.hpp"

#include "adaptci/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adaptci {

namespace {

// Weighted l_p of the vector i -> coord(i). Power sums are taken relative to the
// largest magnitude so that large and tiny coordinates neither overflow nor underflow.
template <typename Coord>
double weighted_lp(double p, const std::vector<double>& w, Coord coord)
{
  const std::size_t k = w.size();
  if (p == 1.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      s += w[i] * std::abs(coord(i));
    return s;
  }
  double m = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    m = std::max(m, w[i] * std::abs(coord(i)));
  if (std::isinf(p) || m == 0.0)
    return m;
  double s = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < k; ++i) {
      const double r = w[i] * coord(i) / m;
      s += r * r;
    }
    return m * std::sqrt(s);
  }
  for (std::size_t i = 0; i < k; ++i)
    s += std::pow(w[i] * std::abs(coord(i)) / m, p);
  return m * std::pow(s, 1.0 / p);
}

void check_dim(const MonotoneNorm& norm, std::size_t got)
{
  if (got != norm.dim())
    throw ValidationError("dimension mismatch: norm has dimension " + std::to_string(norm.dim()) +
                          ", vector has " + std::to_string(got));
}

} // namespace

MonotoneNorm::MonotoneNorm(double p, std::vector<double> weights)
    : p_(p), weights_(std::move(weights))
{
  if (!(p_ >= 1.0))
    throw ValidationError("norm exponent p must be >= 1 (p < 1 is not a norm)");
  if (weights_.empty())
    throw ValidationError("norm needs at least one coordinate");
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w))
      throw ValidationError("norm weights must be finite and strictly positive");
}

MonotoneNorm MonotoneNorm::lp(double p, std::size_t k)
{
  return MonotoneNorm(p, std::vector<double>(k, 1.0));
}

double MonotoneNorm::operator()(std::span<const double> z) const
{
  check_dim(*this, z.size());
  return weighted_lp(p_, weights_, [&](std::size_t i) { return z[i]; });
}

double norm_eval(const MonotoneNorm& norm, std::span<const double> z)
{
  return norm(z);
}

IndexSet::IndexSet(std::size_t k, const std::vector<std::size_t>& zero_based)
    : mask_(k, false)
{
  if (k == 0)
    throw ValidationError("index set needs ambient dimension k >= 1");
  for (std::size_t i : zero_based) {
    if (i >= k)
      throw ValidationError("monotone coordinate " + std::to_string(i + 1) + " outside 1.." +
                            std::to_string(k));
    if (mask_[i])
      throw ValidationError("monotone coordinate " + std::to_string(i + 1) + " listed twice");
    mask_[i] = true;
    ++count_;
  }
}

IndexSet IndexSet::from_one_based(std::size_t k, const std::vector<std::size_t>& one_based)
{
  std::vector<std::size_t> zb;
  zb.reserve(one_based.size());
  for (std::size_t i : one_based) {
    if (i == 0)
      throw ValidationError("monotone coordinates are 1-based; got 0");
    zb.push_back(i - 1);
  }
  return IndexSet(k, zb);
}

IndexSet IndexSet::all(std::size_t k)
{
  std::vector<std::size_t> zb(k);
  for (std::size_t i = 0; i < k; ++i)
    zb[i] = i;
  return IndexSet(k, zb);
}

IndexSet IndexSet::none(std::size_t k)
{
  return IndexSet(k, {});
}

std::vector<std::size_t> IndexSet::indices() const
{
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i])
      out.push_back(i);
  return out;
}

std::vector<std::size_t> IndexSet::one_based() const
{
  auto out = indices();
  for (auto& i : out)
    ++i;
  return out;
}

std::vector<double> project_plus(const IndexSet& v, std::span<const double> z)
{
  if (z.size() != v.dim())
    throw ValidationError("dimension mismatch in orthant projection");
  std::vector<double> out(z.begin(), z.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (v.contains(i))
      out[i] = std::max(out[i], 0.0);
  return out;
}

std::vector<double> project_minus(const IndexSet& v, std::span<const double> z)
{
  if (z.size() != v.dim())
    throw ValidationError("dimension mismatch in orthant projection");
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = v.contains(i) ? std::max(-z[i], 0.0) : -z[i];
  return out;
}

double norm_plus(const MonotoneNorm& norm, const IndexSet& v, std::span<const double> z)
{
  check_dim(norm, z.size());
  return weighted_lp(norm.p(), norm.weights(), [&](std::size_t i) {
    return v.contains(i) ? std::max(z[i], 0.0) : z[i];
  });
}

double norm_minus(const MonotoneNorm& norm, const IndexSet& v, std::span<const double> z)
{
  check_dim(norm, z.size());
  return weighted_lp(norm.p(), norm.weights(), [&](std::size_t i) {
    return v.contains(i) ? std::max(-z[i], 0.0) : -z[i];
  });
}

} // namespace adaptci
