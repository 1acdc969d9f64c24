#include "adaptci/modulus.hpp"

#include "adaptci/detail/sum.hpp"
#include "adaptci/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adaptci {

namespace {

constexpr int kMaxBracketDoublings = 60;
constexpr int kMaxNewtonSteps = 200;
constexpr double kRootTol = 1e-10;

ExtremalForm pick_form(const OrderedPair& pair)
{
  if (!pair.from.same_geometry(pair.to))
    throw ValidationError("ordered pair classes must share the norm and monotone coordinates");
  if (pair.to.dominates(pair.from))
    return ExtremalForm::from_inside_to;
  if (pair.from.dominates(pair.to))
    return ExtremalForm::to_inside_from;
  throw ValidationError("ordered pair classes are not ladder-ordered "
                        "(need gamma/C ordering with one class containing the other)");
}

} // namespace

std::size_t ModulusSolution::active_count() const
{
  return static_cast<std::size_t>(std::count_if(D.begin(), D.end(), [](double d) { return d > 0.0; }));
}

ModulusProblem::ModulusProblem(const OrderedPair& pair, const Design& design)
{
  init(pair, design, projected_norms(design, pair.from.norm(), pair.from.v()));
}

ModulusProblem::ModulusProblem(const OrderedPair& pair, const Design& design,
                               const ProjectedNorms& norms)
{
  init(pair, design, norms);
}

void ModulusProblem::init(const OrderedPair& pair, const Design& design,
                          const ProjectedNorms& norms)
{
  form_ = pick_form(pair);
  if (pair.from.dim() != design.k())
    throw ValidationError("class dimension does not match the design");
  const std::size_t n = design.n();
  if (norms.plus.size() != n || norms.minus.size() != n)
    throw ValidationError("projected norms do not match the design");
  from_pen_.resize(n);
  to_pen_.resize(n);
  a_.resize(n);
  w_.resize(n);
  sigma_ = design.sigma();
  for (std::size_t i = 0; i < n; ++i) {
    from_pen_[i] = pair.from.penalty(norms.plus[i]);
    to_pen_[i] = pair.to.penalty(norms.minus[i]);
    a_[i] = from_pen_[i] + to_pen_[i];
    w_[i] = 1.0 / (sigma_[i] * sigma_[i]);
  }
  b_min_ = *std::min_element(a_.begin(), a_.end());
}

double ModulusProblem::sum_sq_hinge(double b) const
{
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    const double h = b - a_[i];
    if (h > 0.0)
      s += w_[i] * h * h;
  }
  return s.value();
}

double ModulusProblem::sum_hinge(double b) const
{
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    const double h = b - a_[i];
    if (h > 0.0)
      s += w_[i] * h;
  }
  return s.value();
}

double ModulusProblem::inverse(double b) const
{
  if (!(b >= 0.0))
    throw ValidationError("inverse modulus needs b >= 0");
  return std::sqrt(sum_sq_hinge(b));
}

double ModulusProblem::solve_b(double delta) const
{
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ValidationError("forward modulus needs a finite delta > 0");
  const double target = delta * delta;

  // Bracket: inverse(b_min) = 0; grow the upper end geometrically.
  double lo = b_min_;
  double step = delta * *std::min_element(sigma_.begin(), sigma_.end());
  double hi = lo + step;
  int doublings = 0;
  while (sum_sq_hinge(hi) < target) {
    if (++doublings > kMaxBracketDoublings)
      throw NoMassAtDelta("inverse modulus never reaches delta within the bracket cap");
    lo = hi;
    step *= 2.0;
    hi = b_min_ + step;
  }

  // Newton on Q(b) = sum w (b - a)_+^2, started from the right end. Q is convex and
  // increasing on [b_min, inf), so the iterates decrease monotonically to the root;
  // the bisection fallback only guards against round-off.
  double b = hi;
  for (int it = 0; it < kMaxNewtonSteps; ++it) {
    const double q = sum_sq_hinge(b);
    if (std::abs(std::sqrt(q) - delta) <= kRootTol * delta)
      break;
    if (q > target)
      hi = b;
    else
      lo = b;
    const double dq = 2.0 * sum_hinge(b);
    double next = dq > 0.0 ? b - (q - target) / dq : 0.5 * (lo + hi);
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    if (next == b)
      break;
    b = next;
  }

  // Polish: on the final piece the active set is fixed and Q is an exact quadratic,
  // sum_A w (b - a)^2 = W (b - abar)^2 + S, so solve it in closed form.
  detail::CompensatedSum wsum, wa;
  for (std::size_t i = 0; i < a_.size(); ++i)
    if (a_[i] < b) {
      wsum += w_[i];
      wa += w_[i] * a_[i];
    }
  const double W = wsum.value();
  if (W > 0.0) {
    const double abar = wa.value() / W;
    detail::CompensatedSum ss;
    double max_active = -std::numeric_limits<double>::infinity();
    double min_inactive = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (a_[i] < b) {
        const double d = a_[i] - abar;
        ss += w_[i] * d * d;
        max_active = std::max(max_active, a_[i]);
      } else {
        min_inactive = std::min(min_inactive, a_[i]);
      }
    }
    const double rem = (target - ss.value()) / W;
    if (rem >= 0.0) {
      const double exact = abar + std::sqrt(rem);
      if (exact > max_active && exact <= min_inactive)
        b = exact;
    }
  }
  return b;
}

ModulusSolution ModulusProblem::solve(double delta) const
{
  ModulusSolution sol;
  sol.delta = delta;
  sol.b = solve_b(delta);
  sol.form = form_;
  const std::size_t n = a_.size();
  sol.f_from.resize(n);
  sol.f_to.resize(n);
  sol.D.resize(n);
  detail::CompensatedSum weighted;
  for (std::size_t i = 0; i < n; ++i) {
    const double hinge = std::max(sol.b - a_[i], 0.0);
    sol.D[i] = hinge;
    if (form_ == ExtremalForm::from_inside_to) {
      sol.f_from[i] = from_pen_[i];
      sol.f_to[i] = from_pen_[i] + hinge; // max(b - to_pen, from_pen)
    } else {
      sol.f_to[i] = sol.b - to_pen_[i];
      sol.f_from[i] = sol.f_to[i] - hinge; // min(f_to, from_pen)
    }
    weighted += hinge * w_[i];
  }
  const double s = weighted.value();
  if (!(s > 0.0))
    throw DegenerateModulus("hinge weights sum to zero; modulus derivative undefined");
  sol.omega_prime = delta / s;
  return sol;
}

double inverse_modulus(const OrderedPair& pair, const Design& design, double b)
{
  return ModulusProblem(pair, design).inverse(b);
}

ModulusSolution forward_modulus(const OrderedPair& pair, const Design& design, double delta)
{
  return ModulusProblem(pair, design).solve(delta);
}

double omega_prime(const ModulusSolution& solution, const Design& design)
{
  if (solution.D.size() != design.n())
    throw ValidationError("modulus solution does not match the design");
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < design.n(); ++i)
    s += solution.D[i] / (design.sigma(i) * design.sigma(i));
  if (!(s.value() > 0.0))
    throw DegenerateModulus("hinge weights sum to zero; modulus derivative undefined");
  return solution.delta / s.value();
}

double inverse_modulus_monotone_only(const HolderClass& cls, const Design& design, double b,
                                     MonotoneOnlyDirection direction)
{
  if (!(b >= 0.0))
    throw ValidationError("inverse modulus needs b >= 0");
  if (cls.dim() != design.k())
    throw ValidationError("class dimension does not match the design");
  const bool up = direction == MonotoneOnlyDirection::holder_to_monotone;
  const auto& v = cls.v();
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < design.n(); ++i) {
    auto x = design.point(i);
    bool in_cone = true;
    for (std::size_t j = 0; j < x.size() && in_cone; ++j) {
      if (v.contains(j))
        in_cone = up ? x[j] >= 0.0 : x[j] <= 0.0;
      else
        in_cone = x[j] == 0.0;
    }
    if (!in_cone)
      continue;
    const double t = up ? norm_plus(cls.norm(), v, x) : norm_minus(cls.norm(), v, x);
    const double h = std::max(b - cls.penalty(t), 0.0) / design.sigma(i);
    s += h * h;
  }
  return std::sqrt(s.value());
}

} // namespace adaptci
