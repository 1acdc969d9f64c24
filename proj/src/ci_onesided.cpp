#include "adaptci/ci_onesided.hpp"

#include "adaptci/detail/sum.hpp"
#include "adaptci/errors.hpp"
#include "adaptci/normal.hpp"

#include <algorithm>

namespace adaptci {

LadderModuli::LadderModuli(const ClassLadder& ladder, const Design& design)
    : ladder_(ladder), n_(design.n())
{
  if (ladder.norm().dim() != design.k())
    throw ValidationError("ladder dimension does not match the design");
  const ProjectedNorms norms = projected_norms(design, ladder.norm(), ladder.v());
  const HolderClass& big = ladder.largest();
  lower_.reserve(ladder.size());
  upper_.reserve(ladder.size());
  for (const HolderClass& cls : ladder.levels()) {
    lower_.emplace_back(OrderedPair{big, cls}, design, norms);
    upper_.emplace_back(OrderedPair{cls, big}, design, norms);
  }
}

double OneSidedRule::estimator(std::span<const double> y) const
{
  if (y.size() != weight.size())
    throw ValidationError("data length does not match the design");
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (weight[i] != 0.0)
      s += weight[i] * y[i];
  return s.value() + center_offset;
}

double OneSidedRule::apply(std::span<const double> y) const
{
  return estimator(y) - center_offset + intercept;
}

OneSidedBound OneSidedRule::bound(std::span<const double> y) const
{
  OneSidedBound b;
  b.estimator = estimator(y);
  b.value = b.estimator - center_offset + intercept;
  b.side = side;
  b.alpha = alpha;
  b.delta = delta;
  b.level_index = level_index;
  b.sd = omega_prime;
  b.max_bias_halfwidth = 0.5 * (omega - delta * omega_prime);
  b.omega = omega;
  b.active_points = active_points;
  return b;
}

std::vector<double> hinge_weights(const ModulusSolution& solution, const Design& design)
{
  if (solution.D.size() != design.n())
    throw ValidationError("modulus solution does not match the design");
  if (std::none_of(solution.D.begin(), solution.D.end(), [](double d) { return d > 0.0; }))
    throw AllZeroWeights("no design point carries a positive hinge weight");
  return solution.D;
}

OneSidedRule make_rule(const LadderModuli& moduli, Side side, std::size_t j, double alpha,
                       double beta)
{
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("alpha must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0))
    throw ValidationError("beta must lie in (0, 1)");
  if (j >= moduli.size())
    throw ValidationError("ladder level out of range");

  const double z = normal_upper_quantile(alpha);
  const double delta = z + normal_quantile(beta);
  if (!(delta > 0.0))
    throw ValidationError("z_{1-alpha} + z_beta must be positive");

  ModulusSolution sol;
  try {
    sol = moduli.problem(side, j).solve(delta);
  } catch (const DegenerateModulus& e) {
    throw AllZeroWeights(e.what());
  }

  OneSidedRule r;
  r.side = side;
  r.level_index = j;
  r.alpha = alpha;
  r.delta = delta;
  r.omega = sol.b;
  r.omega_prime = sol.omega_prime;
  const std::size_t n = sol.D.size();
  const std::vector<double>& prec = moduli.problem(side, j).precision();
  detail::CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i)
    total += sol.D[i] * prec[i];
  const double S = total.value();

  // L-hat = (f_from(0) + f_to(0)) / 2 + sum_i v_i (y_i - (f_from + f_to)(x_i) / 2),
  // and f_from(0) = 0, f_to(0) = omega for every extremal pair built here.
  r.weight.assign(n, 0.0);
  detail::CompensatedSum centering;
  for (std::size_t i = 0; i < n; ++i) {
    if (sol.D[i] <= 0.0)
      continue;
    r.weight[i] = sol.D[i] * prec[i] / S;
    centering += r.weight[i] * 0.5 * (sol.f_from[i] + sol.f_to[i]);
    ++r.active_points;
  }
  r.center_offset = 0.5 * r.omega - centering.value();

  // max bias (omega - delta omega') / 2 and sd omega'
  const double bias = 0.5 * (r.omega - delta * r.omega_prime);
  const double shift = bias + z * r.omega_prime;
  r.intercept = side == Side::lower ? r.center_offset - shift : r.center_offset + shift;
  return r;
}

namespace {

OneSidedBound one_bound(const Design& design, std::span<const double> y,
                        const ClassLadder& ladder, std::size_t j, double alpha, double beta,
                        Side side)
{
  if (y.size() != design.n())
    throw ValidationError("data length does not match the design");
  const LadderModuli moduli(ladder, design);
  return make_rule(moduli, side, j, alpha, beta).bound(y);
}

} // namespace

OneSidedBound lower_bound(const Design& design, std::span<const double> y,
                          const ClassLadder& ladder, std::size_t j, double alpha, double beta)
{
  return one_bound(design, y, ladder, j, alpha, beta, Side::lower);
}

OneSidedBound upper_bound(const Design& design, std::span<const double> y,
                          const ClassLadder& ladder, std::size_t j, double alpha, double beta)
{
  return one_bound(design, y, ladder, j, alpha, beta, Side::upper);
}

} // namespace adaptci
