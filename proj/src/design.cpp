#include "adaptci/design.hpp"

#include "adaptci/errors.hpp"

#include <cmath>
#include <string>

namespace adaptci {

Design::Design(std::size_t k, std::vector<double> coords, std::vector<double> sigma)
    : k_(k), coords_(std::move(coords)), sigma_(std::move(sigma))
{
  if (k_ == 0)
    throw ValidationError("design dimension k must be >= 1");
  if (sigma_.empty())
    throw ValidationError("design needs at least one point");
  if (coords_.size() != k_ * sigma_.size())
    throw ValidationError("design has " + std::to_string(coords_.size()) +
                          " coordinates, expected n*k = " + std::to_string(k_ * sigma_.size()));
  for (double c : coords_)
    if (!std::isfinite(c))
      throw ValidationError("design coordinates must be finite");
  for (double s : sigma_)
    if (!(s > 0.0) || !std::isfinite(s))
      throw ValidationError("noise standard deviations must be finite and > 0");
}

Design Design::homoskedastic(std::size_t k, std::vector<double> coords, double sigma)
{
  const std::size_t n = k == 0 ? 0 : coords.size() / k;
  return Design(k, std::move(coords), std::vector<double>(n, sigma));
}

Design Design::reflected() const
{
  std::vector<double> c(coords_);
  for (double& v : c)
    v = -v;
  return Design(k_, std::move(c), sigma_);
}

Design Design::subset(const std::vector<std::size_t>& rows) const
{
  std::vector<double> c;
  std::vector<double> s;
  c.reserve(rows.size() * k_);
  s.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= n())
      throw ValidationError("design row index out of range");
    auto p = point(r);
    c.insert(c.end(), p.begin(), p.end());
    s.push_back(sigma_[r]);
  }
  return Design(k_, std::move(c), std::move(s));
}

ProjectedNorms projected_norms(const Design& design, const MonotoneNorm& norm, const IndexSet& v)
{
  if (norm.dim() != design.k() || v.dim() != design.k())
    throw ValidationError("norm / monotone index set dimension does not match the design");
  ProjectedNorms out;
  out.plus.resize(design.n());
  out.minus.resize(design.n());
  for (std::size_t i = 0; i < design.n(); ++i) {
    out.plus[i] = norm_plus(norm, v, design.point(i));
    out.minus[i] = norm_minus(norm, v, design.point(i));
  }
  return out;
}

} // namespace adaptci
