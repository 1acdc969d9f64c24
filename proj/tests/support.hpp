#pragma once

#include "adaptci/design.hpp"
#include "adaptci/function_class.hpp"
#include "adaptci/modulus.hpp"
#include "adaptci/rng.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <cmath>
#include <vector>

namespace adaptci::testing {

inline double uniform(Engine& rng, double lo, double hi)
{
  return boost::random::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_int(Engine& rng, std::size_t lo, std::size_t hi)
{
  return boost::random::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double rel_err(double a, double b)
{
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

inline HolderClass lipschitz(double C, std::size_t k = 2)
{
  return HolderClass(1.0, C, IndexSet::all(k), MonotoneNorm::lp(2.0, k));
}

// The three-point instance used across the modulus tests.
inline Design three_point_design()
{
  return Design::homoskedastic(2, {0.5, 0.5, -0.5, -0.5, 0.3, -0.2});
}

inline OrderedPair three_point_pair()
{
  return {lipschitz(1.0), lipschitz(2.0)};
}

struct RandomInstance {
  Design design;
  HolderClass small;
  HolderClass large;
};

//! Random design (n <= max_n, k <= 3), random V, and a pair of classes sharing
//! geometry with gamma in [0.2, 1] and C in [0.5, 3] that nests on the design.
inline RandomInstance random_instance(Engine& rng, std::size_t max_n = 12)
{
  const std::size_t k = uniform_int(rng, 1, 3);
  const std::size_t n = uniform_int(rng, 2, max_n);
  std::vector<double> coords(n * k);
  for (double& c : coords)
    c = uniform(rng, -1.0, 1.0);
  std::vector<double> sigma(n);
  for (double& s : sigma)
    s = uniform(rng, 0.5, 1.5);
  std::vector<std::size_t> v;
  for (std::size_t j = 0; j < k; ++j)
    if (uniform(rng, 0.0, 1.0) < 0.6)
      v.push_back(j);
  const double p_choice = uniform(rng, 0.0, 3.0);
  const double p = p_choice < 1.0 ? 1.0 : (p_choice < 2.0 ? 2.0 : MonotoneNorm::infinity);
  std::vector<double> w(k);
  for (double& x : w)
    x = uniform(rng, 0.5, 2.0);
  const MonotoneNorm norm(p, w);
  // shrink the design so it has diameter < 1 together with the origin; there
  // the ordering gamma1 >= gamma2, C1 <= C2 makes the pair nest
  double diam = 0.0;
  std::vector<double> diff(k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j <= n; ++j) {
      for (std::size_t c = 0; c < k; ++c)
        diff[c] = coords[i * k + c] - (j < n ? coords[j * k + c] : 0.0);
      diam = std::max(diam, norm(diff));
    }
  if (diam > 0.99)
    for (double& c : coords)
      c *= 0.99 / diam;
  double g1 = uniform(rng, 0.2, 1.0), g2 = uniform(rng, 0.2, 1.0);
  double c1 = uniform(rng, 0.5, 3.0), c2 = uniform(rng, 0.5, 3.0);
  if (g1 < g2)
    std::swap(g1, g2);
  if (c1 > c2)
    std::swap(c1, c2);
  return {Design(k, std::move(coords), std::move(sigma)), HolderClass(g1, c1, IndexSet(k, v), norm),
          HolderClass(g2, c2, IndexSet(k, v), norm)};
}

inline std::vector<double> draw_normals(Engine& rng, std::size_t n)
{
  boost::random::normal_distribution<double> nd;
  std::vector<double> out(n);
  for (double& u : out)
    u = nd(rng);
  return out;
}

} // namespace adaptci::testing
