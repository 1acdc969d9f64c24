#include "adaptci/simulate.hpp"

#include "adaptci/errors.hpp"
#include "adaptci/io.hpp"
#include "adaptci/normal.hpp"
#include "adaptci/parallel.hpp"
#include "adaptci/rng.hpp"
#include "adaptci/variance.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace adaptci {

namespace {

constexpr double kContainTol = 1e-10;

void draw_design(Engine& eng, std::size_t n, double h, std::vector<double>& coords)
{
  boost::random::uniform_real_distribution<double> u(-h, h);
  coords.resize(2 * n);
  for (double& c : coords)
    c = u(eng);
}

struct Accumulator {
  std::size_t count = 0;
  std::size_t failures = 0;
  std::size_t empty = 0;
  std::vector<double> lengths;
  std::vector<double> hits;
};

MethodSummary summarize(const std::string& label, const Accumulator& a)
{
  MethodSummary m;
  m.label = label;
  m.count = a.count;
  m.failures = a.failures;
  m.empty = a.empty;
  if (a.count == 0)
    return m;
  auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
    const double k = static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v)
      s += x;
    mean = s / k;
    double ss = 0.0;
    for (double x : v)
      ss += (x - mean) * (x - mean);
    se = v.size() > 1 ? std::sqrt(ss / (k - 1.0)) / std::sqrt(k) : 0.0;
  };
  mean_se(a.lengths, m.mean_length, m.se_length);
  mean_se(a.hits, m.coverage, m.se_coverage);
  return m;
}

struct RepOutcome {
  std::vector<int> status; // -1 failed, 0 miss, 1 covered
  std::vector<double> length;
  std::vector<char> empty;
  bool calibrated_attempted = false;
  bool calibrated_done = false;
  double tau = 0.0;
  double contain_excess = 0.0;
};

double lp_plus_norm(std::span<const double> x)
{
  double s = 0.0;
  for (double v : x)
    if (v > 0.0)
      s += v * v;
  return std::sqrt(s);
}

std::string fmt3(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string with_commas(std::size_t n)
{
  std::string s = std::to_string(n);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3)
    s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

double median(std::vector<double> v)
{
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double sample_sd(const std::vector<double>& v)
{
  double m = 0.0;
  for (double x : v)
    m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v)
    ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

const char* truth_name(Truth t)
{
  switch (t) {
  case Truth::f1:
    return "f1";
  case Truth::f2:
    return "f2";
  case Truth::f3:
    return "f3";
  }
  return "unknown";
}

double truth_eval(Truth which, std::span<const double> x, double gamma)
{
  if (x.size() != 2)
    throw ValidationError("simulation truths are defined on R^2");
  switch (which) {
  case Truth::f1:
    return 0.0;
  case Truth::f2:
    return holder_power(lp_plus_norm(x), gamma);
  case Truth::f3:
    return std::sqrt(lp_plus_norm(x));
  }
  return 0.0;
}

HolderClass simulation_class(double gamma, double C)
{
  return HolderClass(gamma, C, IndexSet::all(2), MonotoneNorm::lp(2.0, 2));
}

ClassLadder two_level_ladder()
{
  return ClassLadder({simulation_class(1.0), simulation_class(1e-3)});
}

ClassLadder six_level_ladder()
{
  std::vector<HolderClass> levels;
  for (int j = 1; j <= 5; ++j)
    levels.push_back(simulation_class(1.0 - (j - 1) / 5.0));
  levels.push_back(simulation_class(1e-3));
  return ClassLadder(std::move(levels));
}

const MethodSummary& SimReport::method(const std::string& label) const
{
  for (const auto& m : methods)
    if (m.label == label)
      return m;
  throw ValidationError("no method named '" + label + "' in the report");
}

std::vector<double> draw_uniform_design(std::size_t n, double half_width, std::uint64_t seed,
                                        std::uint64_t purpose, std::uint64_t index)
{
  Engine eng = make_engine(seed, purpose, index);
  std::vector<double> coords;
  draw_design(eng, n, half_width, coords);
  return coords;
}

SimReport run_scenario(const Scenario& s)
{
  if (s.reps < 1 || s.n < 1)
    throw ValidationError("scenario needs reps >= 1 and n >= 1");
  if (!(s.alpha > 0.0 && s.alpha < 1.0))
    throw ValidationError("alpha must lie in (0, 1)");
  if (s.ladder.norm().dim() != 2)
    throw ValidationError("simulation designs live in R^2");
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::string> labels;
  if (s.bonferroni)
    labels.push_back("bonferroni");
  const std::size_t cal_index = labels.size();
  if (s.calibrated)
    labels.push_back("calibrated");
  const std::size_t mm_offset = labels.size();
  for (const auto& m : s.minimax)
    labels.push_back(m.label);
  if (labels.empty())
    throw ValidationError("scenario requests no methods");
  const std::size_t M = labels.size();

  std::vector<RepOutcome> out(s.reps);
  parallel_for(s.reps, resolve_threads(s.threads), [&](std::size_t rep) {
    RepOutcome& r = out[rep];
    r.status.assign(M, -1);
    r.length.assign(M, 0.0);
    r.empty.assign(M, 0);

    Engine eng = make_engine(s.seed, kStreamSimulation, rep);
    std::vector<double> coords;
    draw_design(eng, s.n, s.half_width, coords);
    boost::random::normal_distribution<double> nd;
    std::vector<double> y(s.n);
    for (std::size_t i = 0; i < s.n; ++i)
      y[i] = truth_eval(s.truth, {coords.data() + 2 * i, 2}, s.truth_gamma) + nd(eng);
    const double f0 = 0.0; // every truth vanishes at the origin
    const Design design = Design::homoskedastic(2, std::move(coords), 1.0);

    std::optional<LadderModuli> moduli;
    try {
      moduli.emplace(s.ladder, design);
    } catch (const NumericalError&) {
    }

    auto record = [&](std::size_t m, const AdaptiveCI& ci) {
      r.empty[m] = ci.empty;
      r.length[m] = ci.length();
      r.status[m] = ci.covers(f0) ? 1 : 0;
    };

    std::optional<AdaptiveCI> bonf;
    if (s.bonferroni && moduli) {
      try {
        bonf = bonferroni_ci(*moduli, y, s.alpha);
        record(0, *bonf);
      } catch (const NumericalError&) {
      }
    }
    r.calibrated_attempted = s.calibrated && (s.calibrated_reps == 0 || rep < s.calibrated_reps);
    if (r.calibrated_attempted && moduli) {
      try {
        const TauStar ts = tau_star(*moduli, s.alpha, s.mc_draws,
                                    stream_seed(s.seed, kStreamCalibration, rep), 1);
        const AdaptiveCI cal = interval_at_level(*moduli, y, ts.tau, CiMethod::calibrated);
        record(cal_index, cal);
        r.calibrated_done = true;
        r.tau = ts.tau;
        if (bonf && !cal.empty) {
          if (bonf->empty)
            r.contain_excess = std::numeric_limits<double>::infinity();
          else
            r.contain_excess =
                std::max({0.0, bonf->lower - cal.lower, cal.upper - bonf->upper});
        }
      } catch (const NumericalError&) {
      }
    }
    for (std::size_t k = 0; k < s.minimax.size(); ++k) {
      try {
        const FixedLengthCI ci = MinimaxCI(s.minimax[k].cls, design, s.alpha, k).apply(y);
        r.length[mm_offset + k] = ci.length();
        r.status[mm_offset + k] = ci.covers(f0) ? 1 : 0;
      } catch (const NumericalError&) {
      }
    }
  });

  SimReport rep;
  rep.name = s.name;
  rep.truth = s.truth;
  rep.n = s.n;
  rep.reps = s.reps;
  rep.alpha = s.alpha;
  rep.seed = s.seed;
  std::vector<Accumulator> acc(M);
  CalibrationSummary cal;
  cal.naive_tau = s.alpha / (2.0 * static_cast<double>(s.ladder.size()));
  cal.min_tau = std::numeric_limits<double>::infinity();
  double tau_sum = 0.0;
  for (const RepOutcome& r : out) {
    bool any = false;
    for (std::size_t m = 0; m < M; ++m) {
      if (s.calibrated && m == cal_index && !r.calibrated_attempted)
        continue;
      if (r.status[m] < 0) {
        ++acc[m].failures;
        continue;
      }
      any = true;
      ++acc[m].count;
      acc[m].empty += r.empty[m] ? 1 : 0;
      acc[m].lengths.push_back(r.length[m]);
      acc[m].hits.push_back(r.status[m] == 1 ? 1.0 : 0.0);
    }
    if (!any)
      ++rep.failed_reps;
    if (r.calibrated_done) {
      ++cal.reps;
      tau_sum += r.tau;
      cal.min_tau = std::min(cal.min_tau, r.tau);
      if (r.tau < cal.naive_tau)
        ++cal.below_naive;
      if (r.contain_excess > kContainTol)
        ++cal.containment_violations;
      cal.max_containment_excess = std::max(cal.max_containment_excess, r.contain_excess);
    }
  }
  for (std::size_t m = 0; m < M; ++m)
    rep.methods.push_back(summarize(labels[m], acc[m]));
  if (s.calibrated) {
    cal.mean_tau = cal.reps ? tau_sum / static_cast<double>(cal.reps) : 0.0;
    if (cal.reps == 0)
      cal.min_tau = 0.0;
    rep.calibration = cal;
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::vector<Scenario> table_scenarios(int table, const std::vector<std::size_t>& ns,
                                      std::size_t reps, std::uint64_t seed)
{
  std::vector<Scenario> out;
  auto base = [&](std::size_t n, Truth truth) {
    Scenario s;
    s.name = "table" + std::to_string(table);
    s.truth = truth;
    s.n = n;
    s.reps = reps;
    s.seed = seed;
    return s;
  };
  for (std::size_t n : ns) {
    switch (table) {
    case 1: {
      Scenario s = base(n, Truth::f1);
      s.minimax = {{"minimax_conservative", simulation_class(1e-3)},
                   {"minimax_oracle", simulation_class(1.0)}};
      out.push_back(s);
      break;
    }
    case 2: {
      Scenario s = base(n, Truth::f2);
      s.minimax = {{"minimax_oracle", simulation_class(1e-3)}};
      out.push_back(s);
      break;
    }
    case 3:
      out.push_back(base(n, Truth::f1));
      out.push_back(base(n, Truth::f2));
      break;
    case 4: {
      Scenario s = base(n, Truth::f3);
      s.ladder = six_level_ladder();
      s.minimax = {{"minimax_conservative", simulation_class(1e-3)},
                   {"minimax_oracle", simulation_class(0.5)}};
      out.push_back(s);
      break;
    }
    default:
      throw ValidationError("simulation table must be 1, 2, 3 or 4");
    }
  }
  return out;
}

std::string reports_markdown(int table, const std::vector<SimReport>& reports)
{
  std::ostringstream os;
  if (reports.empty())
    return "";
  if (table == 3) {
    // coverage, one column per (truth, method)
    std::vector<std::string> cols;
    std::map<std::size_t, std::map<std::string, double>> rows;
    for (const auto& r : reports)
      for (const auto& m : r.methods) {
        const std::string c = std::string("f = ") + truth_name(r.truth) + " " + m.label;
        if (std::find(cols.begin(), cols.end(), c) == cols.end())
          cols.push_back(c);
        rows[r.n][c] = m.coverage;
      }
    os << "| |";
    for (const auto& c : cols)
      os << ' ' << c << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < cols.size(); ++i)
      os << "---|";
    os << '\n';
    for (const auto& [n, vals] : rows) {
      os << "| n = " << with_commas(n) << " |";
      for (const auto& c : cols) {
        auto it = vals.find(c);
        os << ' ' << (it == vals.end() ? std::string("") : fmt3(it->second)) << " |";
      }
      os << '\n';
    }
    return os.str();
  }
  os << "| |";
  for (const auto& m : reports.front().methods)
    os << ' ' << m.label << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < reports.front().methods.size(); ++i)
    os << "---|";
  os << '\n';
  for (const auto& r : reports) {
    os << "| n = " << with_commas(r.n) << " |";
    for (const auto& m : r.methods)
      os << ' ' << fmt3(m.mean_length) << " |";
    os << '\n';
  }
  return os.str();
}

std::string reports_csv(const std::vector<SimReport>& reports)
{
  std::ostringstream os;
  os << "scenario,truth,n,reps,alpha,seed,method,count,failures,empty,mean_length,se_length,"
        "coverage,se_coverage\n";
  for (const auto& r : reports)
    for (const auto& m : r.methods)
      os << r.name << ',' << truth_name(r.truth) << ',' << r.n << ',' << r.reps << ','
         << format_double(r.alpha) << ',' << r.seed << ',' << m.label << ',' << m.count << ','
         << m.failures << ',' << m.empty << ',' << format_double(m.mean_length) << ','
         << format_double(m.se_length) << ',' << format_double(m.coverage) << ','
         << format_double(m.se_coverage) << '\n';
  return os.str();
}

double rate_exponent(std::size_t k, std::size_t k_plus, double gamma1, double gamma2)
{
  if (k_plus > k)
    throw ValidationError("k_+ cannot exceed k");
  return 1.0 / (2.0 + static_cast<double>(k_plus) / gamma1 +
                static_cast<double>(k - k_plus) / gamma2);
}

RateCheckResult rate_check(const RateCheckConfig& cfg)
{
  if (cfg.ns.size() < 4 || !std::is_sorted(cfg.ns.begin(), cfg.ns.end()) ||
      std::adjacent_find(cfg.ns.begin(), cfg.ns.end()) != cfg.ns.end())
    throw ValidationError("rate check needs at least 4 strictly increasing sample sizes");
  const IndexSet v = IndexSet::from_one_based(2, cfg.v_one_based);
  const MonotoneNorm norm = MonotoneNorm::lp(2.0, 2);
  const HolderClass c1(cfg.gamma1, cfg.C1, v, norm);
  const HolderClass c2(cfg.gamma2, cfg.C2, v, norm);
  const double delta = cfg.delta > 0.0 ? cfg.delta : normal_upper_quantile(0.05);

  RateCheckResult res;
  res.ns = cfg.ns;
  for (std::size_t idx = 0; idx < cfg.ns.size(); ++idx) {
    const Design d = Design::homoskedastic(
        2, draw_uniform_design(cfg.ns[idx], cfg.half_width, cfg.seed, kStreamRateDesign, idx));
    const ProjectedNorms pn = projected_norms(d, norm, v);
    const double a = ModulusProblem(OrderedPair{c1, c2}, d, pn).omega(delta);
    const double b = ModulusProblem(OrderedPair{c2, c1}, d, pn).omega(delta);
    res.omega.push_back(std::max(a, b));
  }
  const double m = static_cast<double>(cfg.ns.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < cfg.ns.size(); ++i) {
    const double lx = std::log(static_cast<double>(cfg.ns[i]));
    const double ly = std::log(res.omega[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  res.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  res.theory = -rate_exponent(2, v.size(), cfg.gamma1, cfg.gamma2);
  res.relative_error = std::abs(res.slope - res.theory) / std::abs(res.theory);
  return res;
}

ProductionData production_stand_in(std::size_t n, std::uint64_t seed)
{
  if (n < 3)
    throw ValidationError("stand-in data needs n >= 3");
  Engine eng = make_engine(seed, kStreamStandIn, 0);
  boost::random::normal_distribution<double> nd;
  auto draw_in = [&](double mean, double sd, double lo, double hi) {
    for (;;) {
      const double v = mean + sd * nd(eng);
      if (v >= lo && v <= hi)
        return v;
    }
  };
  ProductionData d;
  d.x.reserve(2 * n);
  d.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = draw_in(10.818, 1.25, 7.463, 14.226);
    const double l = draw_in(6.352 + 0.55 * (k - 10.818), 0.85, 3.664, 9.142);
    const double y = draw_in(9.952 + 0.45 * (k - 10.818) + 0.5 * (l - 6.352), 0.55, 6.472, 13.233);
    d.x.push_back(k);
    d.x.push_back(l);
    d.y.push_back(y);
  }
  return d;
}

StandInOutcome run_stand_in(std::size_t n, std::uint64_t seed, double alpha,
                            std::size_t mc_draws, unsigned threads)
{
  const ProductionData data = production_stand_in(n, seed);
  std::vector<double> col0(n), col1(n);
  for (std::size_t i = 0; i < n; ++i) {
    col0[i] = data.x[2 * i];
    col1[i] = data.x[2 * i + 1];
  }
  const double x0[2] = {median(col0), median(col1)};
  const MonotoneNorm norm(2.0, {1.0 / sample_sd(col0), 1.0 / sample_sd(col1)});

  StandInOutcome out;
  out.n = n;
  out.sigma2 = estimate_sigma2(2, data.x, data.y, default_bandwidth(2, data.x), threads).sigma2;

  // radius 0.5 keeps every pairwise distance <= 1, where C d^g is decreasing in g
  std::vector<double> coords, y;
  for (std::size_t i = 0; i < n; ++i) {
    const double z[2] = {data.x[2 * i] - x0[0], data.x[2 * i + 1] - x0[1]};
    if (norm(z) <= 0.5) {
      coords.insert(coords.end(), z, z + 2);
      y.push_back(data.y[i]);
    }
  }
  out.n_eff = y.size();
  if (out.n_eff < 3)
    throw NumericalError("restricted support keeps fewer than 3 observations");
  const Design design = Design::homoskedastic(2, coords, std::sqrt(out.sigma2));
  out.C = conservative_c(design, y, 1e-3, norm);

  const IndexSet v = IndexSet::all(2);
  std::vector<HolderClass> levels;
  for (int j = 1; j <= 5; ++j)
    levels.emplace_back(1.0 - (j - 1) / 5.0, out.C, v, norm);
  levels.emplace_back(1e-3, out.C, v, norm);
  const ClassLadder ladder(levels);
  if (!check_nesting(ladder, design).ok)
    throw NumericalError("stand-in ladder fails nesting on the restricted support");

  const LadderModuli moduli(ladder, design);
  out.naive = bonferroni_ci(moduli, y, alpha);
  const TauStar ts = tau_star(moduli, alpha, mc_draws, seed, threads);
  out.tau_star = ts.tau;
  out.calibrated = interval_at_level(moduli, y, ts.tau, CiMethod::calibrated);
  out.calibrated.seed = seed;
  out.calibrated.mc_draws = mc_draws;
  out.conservative = MinimaxCI(ladder.largest(), design, alpha, ladder.size() - 1).apply(y);
  out.oracle = MinimaxCI(ladder.level(0), design, alpha, 0).apply(y);
  return out;
}

} // namespace adaptci
