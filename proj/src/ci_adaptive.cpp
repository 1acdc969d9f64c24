#include "adaptci/ci_adaptive.hpp"

#include "adaptci/detail/sum.hpp"
#include "adaptci/errors.hpp"
#include "adaptci/normal.hpp"
#include "adaptci/parallel.hpp"
#include "adaptci/rng.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace adaptci {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kDrawBlock = 4096;
constexpr double kTauResolution = 1e-4;

void check_alpha(double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("alpha must lie in (0, 1)");
}

} // namespace

const char* method_name(CiMethod m)
{
  switch (m) {
  case CiMethod::bonferroni:
    return "bonferroni";
  case CiMethod::calibrated:
    return "calibrated";
  case CiMethod::onesided_lower:
    return "onesided-lower";
  case CiMethod::onesided_upper:
    return "onesided-upper";
  }
  return "unknown";
}

double AdaptiveCI::length() const
{
  return empty ? 0.0 : upper - lower;
}

bool AdaptiveCI::covers(double value) const
{
  return !empty && lower <= value && value <= upper;
}

AdaptiveCI interval_at_level(const LadderModuli& moduli, std::span<const double> y, double tau,
                             CiMethod method)
{
  check_alpha(tau);
  if (y.size() != moduli.n())
    throw ValidationError("data length does not match the design");
  AdaptiveCI ci;
  ci.method = method;
  ci.tau = tau;
  ci.lower = -kInf;
  ci.upper = kInf;

  const bool want_lower = method != CiMethod::onesided_upper;
  const bool want_upper = method != CiMethod::onesided_lower;
  std::size_t lower_ok = 0;
  std::size_t upper_ok = 0;
  for (Side side : {Side::lower, Side::upper}) {
    if ((side == Side::lower && !want_lower) || (side == Side::upper && !want_upper))
      continue;
    for (std::size_t j = 0; j < moduli.size(); ++j) {
      try {
        const OneSidedBound b = make_rule(moduli, side, j, tau).bound(y);
        ci.per_level_bounds.push_back(b);
        if (side == Side::lower) {
          ci.lower = std::max(ci.lower, b.value);
          ++lower_ok;
        } else {
          ci.upper = std::min(ci.upper, b.value);
          ++upper_ok;
        }
      } catch (const AllZeroWeights& e) {
        ci.skipped_levels.push_back(j);
        ci.diagnostics.push_back(std::string("level ") + std::to_string(j + 1) + " " +
                                 (side == Side::lower ? "lower" : "upper") +
                                 " bound skipped: " + e.what());
      }
    }
  }
  if ((want_lower && lower_ok == 0) || (want_upper && upper_ok == 0))
    throw AllZeroWeights("no ladder level produced a usable bound");
  if (ci.lower > ci.upper) {
    ci.empty = true;
    ci.diagnostics.push_back("lower and upper bounds crossed; interval is empty");
  }
  return ci;
}

AdaptiveCI bonferroni_ci(const LadderModuli& moduli, std::span<const double> y, double alpha)
{
  check_alpha(alpha);
  return interval_at_level(moduli, y, alpha / (2.0 * static_cast<double>(moduli.size())),
                           CiMethod::bonferroni);
}

AdaptiveCI bonferroni_ci(const Design& design, std::span<const double> y,
                         const ClassLadder& ladder, double alpha)
{
  return bonferroni_ci(LadderModuli(ladder, design), y, alpha);
}

double adaptivity_constant(double alpha, std::size_t J)
{
  check_alpha(alpha);
  if (J < 1)
    throw ValidationError("the ladder needs at least one level");
  if (J == 1)
    return 2.0;
  return 2.0 * normal_upper_quantile(alpha / (2.0 * static_cast<double>(J))) /
         normal_upper_quantile(alpha / 2.0);
}

CalibrationCov calibration_cov(const LadderModuli& moduli, double tau)
{
  if (!(tau > 0.0 && tau < 0.5))
    throw ValidationError("calibration level tau must lie in (0, 0.5)");
  const double delta = normal_upper_quantile(tau);
  const std::size_t J = moduli.size();
  const std::vector<double>& prec = moduli.lower(0).precision();

  // columns: D vectors of the lower problems (V) then of the upper problems (W),
  // scaled by 1/sigma; W enters with a minus sign because it is the negated
  // upper estimator noise
  Eigen::MatrixXd M(moduli.n(), 2 * J);
  for (std::size_t j = 0; j < J; ++j) {
    const ModulusSolution lo = moduli.lower(j).solve(delta);
    const ModulusSolution up = moduli.upper(j).solve(delta);
    for (std::size_t i = 0; i < moduli.n(); ++i) {
      const double s = std::sqrt(prec[i]);
      M(i, j) = lo.D[i] * s;
      M(i, J + j) = -up.D[i] * s;
    }
  }
  CalibrationCov c;
  c.tau = tau;
  c.Sigma = (M.transpose() * M) / (delta * delta);
  return c;
}

CalibrationCov calibration_cov(const Design& design, const ClassLadder& ladder, double tau)
{
  return calibration_cov(LadderModuli(ladder, design), tau);
}

GaussianMaxSampler::GaussianMaxSampler(std::size_t dim, std::size_t draws, std::uint64_t seed,
                                       unsigned threads)
    : dim_(dim), draws_(draws), threads_(std::max(1u, threads)), normals_(dim, draws)
{
  if (dim == 0 || draws == 0)
    throw ValidationError("sampler needs a positive dimension and draw count");
  const std::size_t blocks = (draws + kDrawBlock - 1) / kDrawBlock;
  parallel_for(blocks, threads_, [&](std::size_t blk) {
    Engine eng = make_engine(seed, kStreamCalibration, blk);
    boost::random::normal_distribution<double> nd;
    const std::size_t end = std::min(draws, (blk + 1) * kDrawBlock);
    for (std::size_t c = blk * kDrawBlock; c < end; ++c)
      for (std::size_t r = 0; r < dim; ++r)
        normals_(r, c) = nd(eng);
  });
}

GaussianMaxSampler::Estimate GaussianMaxSampler::exceedance(const Eigen::MatrixXd& Sigma,
                                                            double threshold) const
{
  if (static_cast<std::size_t>(Sigma.rows()) != dim_ || Sigma.cols() != Sigma.rows())
    throw ValidationError("covariance dimension does not match the sampler");
  Estimate est;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Sigma);
  if (eig.info() != Eigen::Success) {
    est.repair_failed = true;
    return est;
  }
  Eigen::VectorXd lam = eig.eigenvalues();
  est.min_eigenvalue = lam.minCoeff();
  if (est.min_eigenvalue < -1e-6) {
    est.repair_failed = true;
    return est;
  }
  Eigen::MatrixXd factor;
  if (est.min_eigenvalue < -1e-8) {
    est.repaired = true;
    lam = lam.cwiseMax(0.0);
    Eigen::MatrixXd fixed = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::VectorXd d = fixed.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    fixed = d.asDiagonal() * fixed * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig2(fixed);
    factor = eig2.eigenvectors() * eig2.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  } else {
    factor = eig.eigenvectors() * lam.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  const std::size_t blocks = (draws_ + kDrawBlock - 1) / kDrawBlock;
  std::vector<std::size_t> hits(blocks, 0);
  parallel_for(blocks, threads_, [&](std::size_t blk) {
    const std::size_t begin = blk * kDrawBlock;
    const std::size_t len = std::min(draws_, begin + kDrawBlock) - begin;
    const Eigen::MatrixXd z = factor * normals_.middleCols(begin, len);
    std::size_t h = 0;
    for (Eigen::Index c = 0; c < z.cols(); ++c)
      if (z.col(c).maxCoeff() > threshold)
        ++h;
    hits[blk] = h;
  });
  std::size_t total = 0;
  for (std::size_t h : hits)
    total += h;
  est.probability = static_cast<double>(total) / static_cast<double>(draws_);
  return est;
}

TauStar tau_star(const LadderModuli& moduli, double alpha, std::size_t mc_draws,
                 std::uint64_t seed, unsigned threads)
{
  check_alpha(alpha);
  if (mc_draws < 10000)
    throw ValidationError("tau calibration needs at least 10^4 Monte Carlo draws");
  const std::size_t J = moduli.size();
  TauStar out;
  out.naive = alpha / (2.0 * static_cast<double>(J));
  out.mc_draws = mc_draws;
  out.seed = seed;

  const GaussianMaxSampler sampler(2 * J, mc_draws, seed, threads);
  bool failed = false;
  auto probe = [&](double tau, double& prob) {
    const CalibrationCov cov = calibration_cov(moduli, tau);
    const auto est = sampler.exceedance(cov.Sigma, normal_upper_quantile(tau));
    if (est.repair_failed) {
      failed = true;
      return false;
    }
    prob = est.probability;
    return prob <= alpha; // ties are feasible
  };

  double lo = out.naive;
  double hi = std::min(alpha, 0.5 - 1e-12);
  double p_hi = 0.0;
  double p_lo = 0.0;
  const bool lo_ok = probe(lo, p_lo);
  if (!failed && !lo_ok)
    out.warnings.push_back("Monte Carlo exceedance above alpha at the Bonferroni level; kept alpha/2J");
  if (!failed && probe(hi, p_hi)) {
    out.tau = hi;
    out.exceedance = p_hi;
  } else {
    while (!failed && hi - lo > kTauResolution) {
      const double mid = 0.5 * (lo + hi);
      double p = 0.0;
      if (probe(mid, p)) {
        lo = mid;
        p_lo = p;
      } else {
        hi = mid;
      }
    }
    out.tau = std::max(lo, out.naive);
    out.exceedance = p_lo;
  }
  if (failed) {
    out.fallback = true;
    out.tau = out.naive;
    out.warnings.push_back("calibration covariance failed PSD repair; fell back to alpha/2J");
  }
  return out;
}

TauStar tau_star(const Design& design, const ClassLadder& ladder, double alpha,
                 std::size_t mc_draws, std::uint64_t seed, unsigned threads)
{
  return tau_star(LadderModuli(ladder, design), alpha, mc_draws, seed, threads);
}

AdaptiveCI calibrated_ci(const LadderModuli& moduli, std::span<const double> y, double alpha,
                         std::size_t mc_draws, std::uint64_t seed, unsigned threads)
{
  const TauStar ts = tau_star(moduli, alpha, mc_draws, seed, threads);
  AdaptiveCI ci = interval_at_level(moduli, y, ts.tau, CiMethod::calibrated);
  ci.seed = seed;
  ci.mc_draws = mc_draws;
  for (const auto& w : ts.warnings)
    ci.diagnostics.push_back(w);
  return ci;
}

AdaptiveCI calibrated_ci(const Design& design, std::span<const double> y,
                         const ClassLadder& ladder, double alpha, std::size_t mc_draws,
                         std::uint64_t seed, unsigned threads)
{
  return calibrated_ci(LadderModuli(ladder, design), y, alpha, mc_draws, seed, threads);
}

double adaptive_onesided_lower(const Design& design, std::span<const double> y,
                               const ClassLadder& ladder, double alpha)
{
  check_alpha(alpha);
  const LadderModuli moduli(ladder, design);
  return interval_at_level(moduli, y, alpha / static_cast<double>(ladder.size()),
                           CiMethod::onesided_lower)
      .lower;
}

double adaptive_onesided_upper(const Design& design, std::span<const double> y,
                               const ClassLadder& ladder, double alpha)
{
  check_alpha(alpha);
  const LadderModuli moduli(ladder, design);
  return interval_at_level(moduli, y, alpha / static_cast<double>(ladder.size()),
                           CiMethod::onesided_upper)
      .upper;
}

} // namespace adaptci
