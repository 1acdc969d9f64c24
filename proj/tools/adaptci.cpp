// adaptci command-line interface

#include "adaptci/ci_adaptive.hpp"
#include "adaptci/errors.hpp"
#include "adaptci/io.hpp"
#include "adaptci/minimax_ci.hpp"
#include "adaptci/modulus.hpp"
#include "adaptci/parallel.hpp"
#include "adaptci/simulate.hpp"
#include "adaptci/variance.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace adaptci;

namespace {

struct Common {
  std::string out;
  unsigned threads = 0;
};

struct DataArgs {
  std::string data;
  std::string classes;
  std::string x0;
  bool estimate_sigma = false;
  double bandwidth = 0.0;
  double support_radius = 0.0;
  bool force = false;
};

std::string slurp(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string extension(const std::string& path)
{
  const auto dot = path.rfind('.');
  return dot == std::string::npos ? "" : path.substr(dot + 1);
}

void emit(const std::string& path, const std::string& text)
{
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ValidationError("cannot write '" + path + "'");
  out << text;
}

void emit_json(const std::string& path, const json& j)
{
  if (!path.empty() && extension(path) != "json")
    throw ValidationError("this command writes JSON; use a .json output path");
  emit(path, j.dump(2) + "\n");
}

void report_conflicts(const std::vector<std::string>& problems)
{
  if (problems.empty())
    return;
  std::string msg = "conflicting or missing options:";
  for (const auto& p : problems)
    msg += "\n  - " + p;
  throw ValidationError(msg);
}

RunRecord make_record(const std::string& command, const json& args, std::uint64_t seed,
                      const std::vector<std::string>& input_files)
{
  RunRecord r;
  r.command = command;
  r.arguments = args;
  r.seed = seed;
  r.version = library_version();
  std::string blob = args.dump();
  for (const auto& f : input_files)
    blob += "\n" + slurp(f);
  r.config_hash = fnv1a64_hex(blob);
  return r;
}

json record_json(const RunRecord& r)
{
  json j = to_json(r);
  j.erase("outputs");
  return j;
}

struct Loaded {
  LadderConfig cfg;
  Ingested data;
  ClassLadder ladder;
};

Loaded load(const DataArgs& a, unsigned threads)
{
  const DataFile file = read_csv(a.data);
  LadderConfig cfg = read_ladder_config(a.classes);
  IngestOptions opts;
  opts.threads = threads;
  if (!a.x0.empty())
    opts.x0 = a.x0 == "median" ? column_medians(file) : parse_vector(a.x0);
  opts.basis = cfg.norm.basis;
  opts.estimate_sigma = a.estimate_sigma;
  if (a.bandwidth > 0.0)
    opts.bandwidth = a.bandwidth;
  const double radius = a.support_radius > 0.0 ? a.support_radius
                                               : cfg.support_radius.value_or(0.0);
  if (radius > 0.0) {
    opts.support_radius = radius;
    opts.support_norm = build_norm(cfg.norm, file.k);
  }
  Ingested ing = ingest(file, opts);
  ClassLadder ladder = build_ladder(cfg, ing.design, ing.y);
  return {std::move(cfg), std::move(ing), std::move(ladder)};
}

void require_nesting(const Loaded& L, bool force)
{
  const NestingReport rep = check_nesting(L.ladder, L.data.design);
  if (rep.ok)
    return;
  auto name = [](std::size_t i) {
    return i == NestingReport::origin ? std::string("origin") : "row " + std::to_string(i + 1);
  };
  std::ostringstream os;
  os << "ladder does not nest on this design: level " << rep.level + 1 << " exceeds the largest class by "
     << format_double(rep.max_violation) << " at distance " << format_double(rep.distance)
     << " (" << name(rep.first) << ", " << name(rep.second)
     << "); restrict the support or pass --force";
  if (!force)
    throw ValidationError(os.str());
  std::cerr << "warning: " << os.str() << "\n";
}

void add_data_options(CLI::App* sub, DataArgs& a)
{
  sub->add_option("--data", a.data, "CSV with header x1,...,xk,y[,sigma]")->required();
  sub->add_option("--classes", a.classes, "ladder config JSON")->required();
  sub->add_option("--x0", a.x0, "point of interest \"v1,...,vk\" or \"median\"");
  sub->add_flag("--estimate-sigma", a.estimate_sigma, "estimate sigma when the file has none");
  sub->add_option("--bandwidth", a.bandwidth, "kernel bandwidth for --estimate-sigma");
  sub->add_option("--support-radius", a.support_radius,
                  "keep only points within this distance of x0");
  sub->add_flag("--force", a.force, "run even if the ladder fails the nesting check");
}

json data_args_json(const DataArgs& a)
{
  json j;
  j["data"] = a.data;
  j["classes"] = a.classes;
  j["x0"] = a.x0;
  j["estimate_sigma"] = a.estimate_sigma;
  j["bandwidth"] = a.bandwidth;
  j["support_radius"] = a.support_radius;
  j["force"] = a.force;
  return j;
}

std::size_t parse_level(const std::string& s, std::size_t J)
{
  if (s == "first")
    return 0;
  if (s == "last")
    return J - 1;
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || v < 1 || v > J)
    throw ValidationError("--level must be 1.." + std::to_string(J) + ", first or last");
  return v - 1;
}

std::vector<std::size_t> parse_sizes(const std::string& s)
{
  std::vector<std::size_t> out;
  for (double v : parse_vector(s)) {
    if (v < 1 || v != std::floor(v))
      throw ValidationError("sample sizes must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Adaptive confidence intervals for monotone Hoelder regression"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "worker threads (default: ADAPTCI_THREADS or all)");

  // ci
  DataArgs ci_data;
  double ci_alpha = 0.05;
  std::string ci_method = "bonferroni";
  std::size_t ci_draws = 100000;
  std::uint64_t ci_seed = 42;
  std::string ci_level;
  auto* ci = app.add_subcommand("ci", "two-sided or one-sided adaptive CI, or a minimax CI");
  add_data_options(ci, ci_data);
  ci->add_option("--alpha", ci_alpha);
  ci->add_option("--method", ci_method)
      ->check(CLI::IsMember(
          {"bonferroni", "calibrated", "onesided-lower", "onesided-upper", "minimax"}));
  ci->add_option("--mc-draws", ci_draws);
  ci->add_option("--seed", ci_seed);
  ci->add_option("--level", ci_level, "minimax class: 1..J, first or last");
  ci->add_option("--out", common.out);
  ci->add_option("--threads", common.threads);

  // modulus
  DataArgs mod_data;
  std::size_t mod_from = 0, mod_to = 0;
  double mod_b = -1.0, mod_delta = -1.0;
  auto* mod = app.add_subcommand("modulus", "ordered modulus between two ladder levels");
  add_data_options(mod, mod_data);
  mod->add_option("--from", mod_from, "1-based level of the first class")->required();
  mod->add_option("--to", mod_to, "1-based level of the second class")->required();
  auto* opt_b = mod->add_option("--b", mod_b, "value separation (inverse modulus)");
  auto* opt_delta = mod->add_option("--delta", mod_delta, "distance budget (forward modulus)");
  mod->add_option("--out", common.out);

  // simulate
  int sim_table = 1;
  std::string sim_ns;
  std::size_t sim_reps = 500;
  std::uint64_t sim_seed = 42;
  bool sim_cal = false;
  std::size_t sim_draws = 20000;
  std::size_t sim_cal_reps = 0;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo reproduction of the simulation tables");
  sim->add_option("--table", sim_table)->check(CLI::Range(1, 4));
  sim->add_option("--n", sim_ns, "comma-separated sample sizes");
  sim->add_option("--reps", sim_reps);
  sim->add_option("--seed", sim_seed);
  sim->add_flag("--calibrated", sim_cal, "also run the calibrated CI");
  sim->add_option("--mc-draws", sim_draws, "calibration draws per replication");
  sim->add_option("--calibrated-reps", sim_cal_reps, "calibrate only the first N replications");
  sim->add_option("--out", common.out, "report.{json|md|csv}");
  sim->add_option("--threads", common.threads);

  // rate-check
  std::string rc_gammas = "1,1", rc_cs = "1,2", rc_ns = "100,1000,10000,100000", rc_v = "1,2";
  std::uint64_t rc_seed = 42;
  double rc_delta = 0.0;
  auto* rc = app.add_subcommand("rate-check", "empirical convergence rate of the modulus");
  rc->add_option("--gammas", rc_gammas);
  rc->add_option("--Cs", rc_cs);
  rc->add_option("--ns", rc_ns);
  rc->add_option("--V", rc_v, "monotone coordinates, e.g. \"1,2\" or \"none\"");
  rc->add_option("--delta", rc_delta, "distance budget (default z_0.95)");
  rc->add_option("--seed", rc_seed);
  rc->add_option("--out", common.out);

  // sigma
  std::string sg_data;
  double sg_bw = 0.0;
  auto* sg = app.add_subcommand("sigma", "kernel-smoother noise variance estimate");
  sg->add_option("--data", sg_data)->required();
  sg->add_option("--bandwidth", sg_bw);
  sg->add_option("--out", common.out);
  sg->add_option("--threads", common.threads);

  // calibrate
  DataArgs cal_data;
  double cal_alpha = 0.05;
  std::size_t cal_draws = 100000;
  std::uint64_t cal_seed = 42;
  auto* cal = app.add_subcommand("calibrate", "calibrated per-bound level tau*");
  add_data_options(cal, cal_data);
  cal->add_option("--alpha", cal_alpha);
  cal->add_option("--mc-draws", cal_draws);
  cal->add_option("--seed", cal_seed);
  cal->add_option("--out", common.out);
  cal->add_option("--threads", common.threads);

  // stand-in
  std::size_t si_n = 1636;
  std::uint64_t si_seed = 2001;
  double si_alpha = 0.05;
  std::size_t si_draws = 100000;
  std::string si_write;
  auto* si = app.add_subcommand("stand-in", "synthetic production-function workflow");
  si->add_option("--n", si_n);
  si->add_option("--seed", si_seed);
  si->add_option("--alpha", si_alpha);
  si->add_option("--mc-draws", si_draws);
  si->add_option("--write-data", si_write, "also write the synthetic data as CSV");
  si->add_option("--out", common.out);
  si->add_option("--threads", common.threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const unsigned threads = resolve_threads(common.threads);

    if (*ci) {
      std::vector<std::string> problems;
      if (ci_method != "minimax" && !ci_level.empty())
        problems.push_back("--level only applies to --method minimax");
      if (ci_method != "calibrated" && ci->count("--mc-draws"))
        problems.push_back("--mc-draws only applies to --method calibrated");
      report_conflicts(problems);
      const Loaded L = load(ci_data, threads);
      json args = data_args_json(ci_data);
      args["alpha"] = ci_alpha;
      args["method"] = ci_method;
      args["mc_draws"] = ci_draws;
      args["level"] = ci_level;
      const RunRecord rec = make_record("ci", args, ci_seed, {ci_data.data, ci_data.classes});
      const auto& y = L.data.y;
      json out;
      if (ci_method == "minimax") {
        const std::size_t lev = parse_level(ci_level.empty() ? "last" : ci_level, L.ladder.size());
        out = to_json(minimax_fixed_ci(L.data.design, y, L.ladder.level(lev), ci_alpha, lev));
      } else {
        require_nesting(L, ci_data.force);
        const LadderModuli moduli(L.ladder, L.data.design);
        AdaptiveCI r;
        if (ci_method == "bonferroni")
          r = bonferroni_ci(moduli, y, ci_alpha);
        else if (ci_method == "calibrated")
          r = calibrated_ci(moduli, y, ci_alpha, ci_draws, ci_seed, threads);
        else
          r = interval_at_level(moduli, y, ci_alpha / static_cast<double>(L.ladder.size()),
                                ci_method == "onesided-lower" ? CiMethod::onesided_lower
                                                              : CiMethod::onesided_upper);
        out = to_json(r, L.ladder);
        for (const auto& d : r.diagnostics)
          std::cerr << "warning: " << d << "\n";
      }
      out["seed"] = ci_seed;
      out["n"] = L.data.design.n();
      out["x0"] = L.data.x0;
      if (L.data.variance)
        out["sigma2_estimate"] = L.data.variance->sigma2;
      out["run_record"] = record_json(rec);
      emit_json(common.out, out);
    } else if (*mod) {
      std::vector<std::string> problems;
      if (opt_b->count() == opt_delta->count())
        problems.push_back("give exactly one of --b and --delta");
      report_conflicts(problems);
      const Loaded L = load(mod_data, threads);
      if (mod_from < 1 || mod_from > L.ladder.size() || mod_to < 1 || mod_to > L.ladder.size())
        throw ValidationError("--from/--to must be ladder levels 1.." +
                              std::to_string(L.ladder.size()));
      const OrderedPair pair{L.ladder.level(mod_from - 1), L.ladder.level(mod_to - 1)};
      const ModulusProblem prob(pair, L.data.design);
      json out;
      double delta = mod_delta;
      if (opt_b->count()) {
        if (!(mod_b >= 0.0))
          throw ValidationError("--b must be nonnegative");
        delta = prob.inverse(mod_b);
      }
      out["delta"] = delta;
      if (delta > 0.0) {
        const ModulusSolution s = prob.solve(delta);
        out["b"] = opt_b->count() ? mod_b : s.b;
        out["omega_prime"] = s.omega_prime;
        out["D_nonzero_count"] = s.active_count();
      } else {
        out["b"] = mod_b;
        out["omega_prime"] = nullptr;
        out["D_nonzero_count"] = 0;
      }
      json args = data_args_json(mod_data);
      args["from"] = mod_from;
      args["to"] = mod_to;
      if (opt_b->count())
        args["b"] = mod_b;
      else
        args["delta"] = mod_delta;
      out["run_record"] = record_json(make_record("modulus", args, 0, {mod_data.data, mod_data.classes}));
      emit_json(common.out, out);
    } else if (*sim) {
      std::vector<std::size_t> ns = sim_ns.empty() ? std::vector<std::size_t>{100, 500, 1000}
                                                   : parse_sizes(sim_ns);
      for (std::size_t n : ns)
        if (n > 10000)
          throw ValidationError("desk-scale simulations cap n at 10^4");
      std::vector<SimReport> reports;
      for (Scenario s : table_scenarios(sim_table, ns, sim_reps, sim_seed)) {
        s.calibrated = sim_cal;
        s.mc_draws = sim_draws;
        s.calibrated_reps = sim_cal_reps;
        s.threads = threads;
        reports.push_back(run_scenario(s));
        std::cerr << "table " << sim_table << " " << truth_name(s.truth) << " n=" << s.n
                  << ": " << reports.back().wall_seconds << " s\n";
      }
      const std::string ext = extension(common.out);
      if (ext == "md") {
        emit(common.out, reports_markdown(sim_table, reports));
      } else if (ext == "csv") {
        emit(common.out, reports_csv(reports));
      } else if (ext == "json" || common.out.empty()) {
        json args;
        args["table"] = sim_table;
        args["n"] = ns;
        args["reps"] = sim_reps;
        args["calibrated"] = sim_cal;
        args["mc_draws"] = sim_draws;
        args["calibrated_reps"] = sim_cal_reps;
        json out;
        out["reports"] = json::array();
        for (const auto& r : reports)
          out["reports"].push_back(to_json(r));
        out["run_record"] = record_json(make_record("simulate", args, sim_seed, {}));
        emit_json(common.out, out);
      } else {
        throw ValidationError("--out must end in .json, .md or .csv");
      }
    } else if (*rc) {
      RateCheckConfig cfg;
      const auto g = parse_vector(rc_gammas);
      const auto c = parse_vector(rc_cs);
      if (g.size() != 2 || c.size() != 2)
        throw ValidationError("--gammas and --Cs take two values each");
      cfg.gamma1 = g[0];
      cfg.gamma2 = g[1];
      cfg.C1 = c[0];
      cfg.C2 = c[1];
      cfg.ns = parse_sizes(rc_ns);
      cfg.v_one_based.clear();
      if (rc_v != "none" && !rc_v.empty())
        for (double v : parse_vector(rc_v))
          cfg.v_one_based.push_back(static_cast<std::size_t>(v));
      cfg.delta = rc_delta;
      cfg.seed = rc_seed;
      json out = to_json(rate_check(cfg));
      json args;
      args["gammas"] = rc_gammas;
      args["Cs"] = rc_cs;
      args["ns"] = rc_ns;
      args["V"] = rc_v;
      args["delta"] = rc_delta;
      out["run_record"] = record_json(make_record("rate-check", args, rc_seed, {}));
      emit_json(common.out, out);
    } else if (*sg) {
      const DataFile f = read_csv(sg_data);
      const double h = sg_bw > 0.0 ? sg_bw : default_bandwidth(f.k, f.x);
      const VarianceEstimate e = estimate_sigma2(f.k, f.x, f.y, h, threads);
      json out;
      out["sigma2"] = e.sigma2;
      out["nu1"] = e.trace.nu1;
      out["nu2"] = e.trace.nu2;
      out["bandwidth"] = e.trace.bandwidth;
      json args;
      args["data"] = sg_data;
      args["bandwidth"] = sg_bw;
      out["run_record"] = record_json(make_record("sigma", args, 0, {sg_data}));
      emit_json(common.out, out);
    } else if (*cal) {
      const Loaded L = load(cal_data, threads);
      require_nesting(L, cal_data.force);
      const TauStar t = tau_star(L.data.design, L.ladder, cal_alpha, cal_draws, cal_seed, threads);
      for (const auto& w : t.warnings)
        std::cerr << "warning: " << w << "\n";
      json out = to_json(t);
      json args = data_args_json(cal_data);
      args["alpha"] = cal_alpha;
      args["mc_draws"] = cal_draws;
      out["run_record"] = record_json(make_record("calibrate", args, cal_seed, {cal_data.data, cal_data.classes}));
      emit_json(common.out, out);
    } else if (*si) {
      if (!si_write.empty()) {
        const ProductionData d = production_stand_in(si_n, si_seed);
        std::ostringstream os;
        os << "x1,x2,y\n";
        for (std::size_t i = 0; i < d.y.size(); ++i)
          os << format_double(d.x[2 * i]) << ',' << format_double(d.x[2 * i + 1]) << ','
             << format_double(d.y[i]) << '\n';
        emit(si_write, os.str());
      }
      const StandInOutcome o = run_stand_in(si_n, si_seed, si_alpha, si_draws, threads);
      json out;
      out["n"] = o.n;
      out["n_eff"] = o.n_eff;
      out["sigma2"] = o.sigma2;
      out["C"] = o.C;
      out["tau_star"] = o.tau_star;
      out["minimax_conservative"] = to_json(o.conservative);
      out["minimax_oracle"] = to_json(o.oracle);
      json bon;
      bon["lower"] = o.naive.lower;
      bon["upper"] = o.naive.upper;
      bon["length"] = o.naive.length();
      out["bonferroni"] = bon;
      json c;
      c["lower"] = o.calibrated.lower;
      c["upper"] = o.calibrated.upper;
      c["length"] = o.calibrated.length();
      out["calibrated"] = c;
      json args;
      args["n"] = si_n;
      args["alpha"] = si_alpha;
      args["mc_draws"] = si_draws;
      out["run_record"] = record_json(make_record("stand-in", args, si_seed, {}));
      emit_json(common.out, out);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "elapsed " << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
            << " s\n";
  return 0;
}
