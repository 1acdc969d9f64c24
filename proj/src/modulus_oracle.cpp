#include "adaptci/modulus_oracle.hpp"

#include "adaptci/errors.hpp"
#include "adaptci/qp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>

namespace adaptci {

namespace {

// Upper bound on f(a) - f(b) imposed by one side of the problem; nullopt means
// no constraint between the two points.
using PairBound = std::optional<double>;

struct Side {
  const HolderClass* cls = nullptr; // nullptr: pure monotone along V
  const IndexSet* v = nullptr;

  PairBound bound(std::span<const double> a, std::span<const double> b) const
  {
    std::vector<double> diff(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
      diff[j] = a[j] - b[j];
    if (cls)
      return cls->penalty(norm_plus(cls->norm(), cls->v(), diff));
    // f(a) <= f(b) whenever b >= a on V and b = a off V
    for (std::size_t j = 0; j < diff.size(); ++j) {
      if (v->contains(j)) {
        if (diff[j] > 0.0)
          return std::nullopt;
      } else if (diff[j] != 0.0) {
        return std::nullopt;
      }
    }
    return 0.0;
  }
};

struct Merged {
  std::vector<std::vector<double>> points; // distinct nonzero locations
  std::vector<double> weight;              // summed 1 / sigma^2
  std::vector<std::size_t> slot;           // design row -> merged index, or npos for the origin
  double origin_weight = 0.0;
};

constexpr std::size_t npos = static_cast<std::size_t>(-1);

Merged merge_points(const Design& design)
{
  Merged m;
  m.slot.assign(design.n(), npos);
  for (std::size_t i = 0; i < design.n(); ++i) {
    const auto x = design.point(i);
    const double w = 1.0 / (design.sigma(i) * design.sigma(i));
    if (std::all_of(x.begin(), x.end(), [](double t) { return t == 0.0; })) {
      m.origin_weight += w;
      continue;
    }
    std::size_t found = npos;
    for (std::size_t s = 0; s < m.points.size(); ++s)
      if (std::equal(x.begin(), x.end(), m.points[s].begin())) {
        found = s;
        break;
      }
    if (found == npos) {
      found = m.points.size();
      m.points.emplace_back(x.begin(), x.end());
      m.weight.push_back(0.0);
    }
    m.weight[found] += w;
    m.slot[i] = found;
  }
  return m;
}

// Rows a'x >= lb for one side occupying variables [offset, offset + m).
void append_constraints(const Side& side, const Merged& mp, std::size_t offset,
                        std::size_t nvar, double origin_value, std::vector<Eigen::VectorXd>& rows,
                        std::vector<double>& lbs)
{
  const std::size_t m = mp.points.size();
  const std::vector<double> zero(mp.points.empty() ? 0 : mp.points.front().size(), 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    // origin vs point a in both orders
    if (auto ub = side.bound(zero, mp.points[a])) {
      // f(0) - f(a) <= ub  ->  f(a) >= f(0) - ub
      Eigen::VectorXd r = Eigen::VectorXd::Zero(nvar);
      r(offset + a) = 1.0;
      rows.push_back(r);
      lbs.push_back(origin_value - *ub);
    }
    if (auto ub = side.bound(mp.points[a], zero)) {
      // f(a) - f(0) <= ub  ->  -f(a) >= -f(0) - ub
      Eigen::VectorXd r = Eigen::VectorXd::Zero(nvar);
      r(offset + a) = -1.0;
      rows.push_back(r);
      lbs.push_back(-origin_value - *ub);
    }
    for (std::size_t c = 0; c < m; ++c) {
      if (c == a)
        continue;
      if (auto ub = side.bound(mp.points[a], mp.points[c])) {
        // f(a) - f(c) <= ub  ->  f(c) - f(a) >= -ub
        Eigen::VectorXd r = Eigen::VectorXd::Zero(nvar);
        r(offset + c) = 1.0;
        r(offset + a) = -1.0;
        rows.push_back(r);
        lbs.push_back(-*ub);
      }
    }
  }
}

OracleResult solve_sides(const Side& from, const Side& to, const Design& design, double b,
                         const OracleOptions& options)
{
  if (!(b >= 0.0) || !std::isfinite(b))
    throw ValidationError("modulus_oracle: b must be finite and nonnegative");

  const Merged mp = merge_points(design);
  const std::size_t m = mp.points.size();
  const std::size_t nvar = 2 * m;

  OracleResult out;
  out.f_from.assign(design.n(), 0.0);
  out.f_to.assign(design.n(), b);
  const double origin_part = mp.origin_weight * b * b;

  if (m == 0) {
    out.delta = std::sqrt(origin_part);
    return out;
  }

  std::vector<Eigen::VectorXd> rows;
  std::vector<double> lbs;
  append_constraints(from, mp, 0, nvar, 0.0, rows, lbs);
  append_constraints(to, mp, m, nvar, b, rows, lbs);
  Eigen::MatrixXd A(rows.size(), nvar);
  for (std::size_t r = 0; r < rows.size(); ++r)
    A.row(r) = rows[r].transpose();
  const Eigen::VectorXd lb = Eigen::Map<const Eigen::VectorXd>(lbs.data(), lbs.size());

  // objective sum_s w_s (t_s - f_s)^2 = 1/2 x' H x with H = 2 [W -W; -W W]
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nvar, nvar);
  double wsum = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    const double w2 = 2.0 * mp.weight[s];
    H(s, s) = w2;
    H(m + s, m + s) = w2;
    H(s, m + s) = -w2;
    H(m + s, s) = -w2;
    wsum += mp.weight[s];
  }
  const double rho = options.rho > 0.0 ? options.rho : 1e-2 * wsum / static_cast<double>(m);
  const Eigen::MatrixXd G = H + rho * Eigen::MatrixXd::Identity(nvar, nvar);

  // the constant pair (0, b) is feasible for both sides
  Eigen::VectorXd x(nvar);
  x.head(m).setZero();
  x.tail(m).setConstant(b);

  const double scale = std::max(1.0, b);
  int it = 0;
  for (;; ++it) {
    if (it >= options.max_outer)
      throw NonConvergence("modulus_oracle: proximal iterations did not converge");
    const QpResult r = solve_qp(G, -rho * x, A, lb);
    const double step = (r.x - x).cwiseAbs().maxCoeff();
    x = r.x;
    if (step <= options.tol * scale)
      break;
  }

  double obj = origin_part;
  for (std::size_t s = 0; s < m; ++s) {
    const double d = x(m + s) - x(s);
    obj += mp.weight[s] * d * d;
  }
  for (std::size_t i = 0; i < design.n(); ++i) {
    if (mp.slot[i] == npos)
      continue;
    out.f_from[i] = x(mp.slot[i]);
    out.f_to[i] = x(m + mp.slot[i]);
  }
  out.delta = std::sqrt(std::max(obj, 0.0));
  out.outer_iterations = it + 1;
  return out;
}

} // namespace

OracleResult modulus_oracle_solve(const OrderedPair& pair, const Design& design, double b,
                                  const OracleOptions& options)
{
  if (!pair.from.same_geometry(pair.to) || pair.from.dim() != design.k())
    throw ValidationError("modulus_oracle: classes and design disagree on geometry");
  return solve_sides(Side{&pair.from, nullptr}, Side{&pair.to, nullptr}, design, b, options);
}

double modulus_oracle(const OrderedPair& pair, const Design& design, double b,
                      const OracleOptions& options)
{
  return modulus_oracle_solve(pair, design, b, options).delta;
}

double modulus_oracle_monotone_only(const HolderClass& cls, const Design& design, double b,
                                    MonotoneOnlyDirection direction, const OracleOptions& options)
{
  if (cls.dim() != design.k())
    throw ValidationError("modulus_oracle_monotone_only: class and design dimensions differ");
  const Side holder{&cls, nullptr};
  const Side mono{nullptr, &cls.v()};
  if (direction == MonotoneOnlyDirection::holder_to_monotone)
    return solve_sides(holder, mono, design, b, options).delta;
  return solve_sides(mono, holder, design, b, options).delta;
}

} // namespace adaptci
