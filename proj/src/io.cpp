#include "adaptci/io.hpp"

#include "adaptci/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <sstream>

namespace adaptci {

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep))
    out.push_back(trim(cur));
  if (!line.empty() && line.back() == sep)
    out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& v)
{
  if (s.empty())
    return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+')
    ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && ptr == e && std::isfinite(v);
}

double json_number(const json& j, const std::string& what)
{
  if (j.is_number())
    return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity")
      return MonotoneNorm::infinity;
  }
  throw ValidationError(what + " must be a number");
}

json number_or_inf(double v)
{
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  return v;
}

} // namespace

std::string format_double(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

DataFile parse_csv(const std::string& text, const std::string& source)
{
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      header = split(line, ',');
      break;
    }
  }
  if (header.empty())
    throw ValidationError(source + ": empty file, expected header x1,...,xk,y[,sigma]");

  DataFile d;
  d.path = source;
  std::size_t k = 0;
  while (k < header.size() && header[k] == "x" + std::to_string(k + 1))
    ++k;
  const bool has_sigma = header.size() == k + 2 && header[k + 1] == "sigma";
  if (k == 0 || header.size() < k + 1 || header[k] != "y" ||
      (header.size() == k + 2 && !has_sigma) || header.size() > k + 2)
    throw ValidationError(source + ":" + std::to_string(lineno) +
                          ": header must be x1,...,xk,y[,sigma]");
  d.k = k;
  const std::size_t ncol = header.size();

  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty())
      continue;
    const auto cells = split(line, ',');
    if (cells.size() != ncol)
      throw ValidationError(source + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(ncol) + " columns, found " +
                            std::to_string(cells.size()));
    for (std::size_t c = 0; c < ncol; ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v))
        throw ValidationError(source + ":" + std::to_string(lineno) + ":" +
                              std::to_string(c + 1) + ": '" + cells[c] +
                              "' is not a finite number");
      if (c < k)
        d.x.push_back(v);
      else if (c == k)
        d.y.push_back(v);
      else {
        if (!(v > 0.0))
          throw ValidationError(source + ":" + std::to_string(lineno) + ":" +
                                std::to_string(c + 1) + ": sigma must be positive");
        d.sigma.push_back(v);
      }
    }
  }
  if (d.y.empty())
    throw ValidationError(source + ": no data rows");
  return d;
}

DataFile read_csv(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("cannot open data file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path);
}

LadderConfig parse_ladder_config(const json& j)
{
  if (!j.is_object())
    throw ValidationError("ladder config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "V" && it.key() != "norm" && it.key() != "levels" &&
        it.key() != "support_radius")
      throw ValidationError("ladder config: unknown key '" + it.key() + "'");
  LadderConfig c;
  if (!j.contains("V") || !j["V"].is_array())
    throw ValidationError("ladder config needs an array 'V' of 1-based coordinates");
  for (const auto& e : j["V"]) {
    if (!e.is_number_integer() || e.get<long long>() < 1)
      throw ValidationError("ladder config: 'V' entries must be positive integers");
    c.v_one_based.push_back(e.get<std::size_t>());
  }
  if (j.contains("norm")) {
    const json& n = j["norm"];
    if (!n.is_object())
      throw ValidationError("ladder config: 'norm' must be an object");
    for (auto it = n.begin(); it != n.end(); ++it)
      if (it.key() != "p" && it.key() != "weights" && it.key() != "basis")
        throw ValidationError("ladder config: unknown norm key '" + it.key() + "'");
    if (n.contains("p"))
      c.norm.p = json_number(n["p"], "norm.p");
    if (n.contains("weights")) {
      if (!n["weights"].is_array())
        throw ValidationError("norm.weights must be an array");
      for (const auto& w : n["weights"])
        c.norm.weights.push_back(json_number(w, "norm.weights entry"));
    }
    if (n.contains("basis")) {
      std::vector<std::vector<double>> b;
      if (!n["basis"].is_array())
        throw ValidationError("norm.basis must be an array of rows");
      for (const auto& row : n["basis"]) {
        if (!row.is_array())
          throw ValidationError("norm.basis must be an array of rows");
        std::vector<double> r;
        for (const auto& e : row)
          r.push_back(json_number(e, "norm.basis entry"));
        b.push_back(std::move(r));
      }
      c.norm.basis = std::move(b);
    }
  }
  if (!j.contains("levels") || !j["levels"].is_array() || j["levels"].empty())
    throw ValidationError("ladder config needs a nonempty 'levels' array");
  for (const auto& l : j["levels"]) {
    if (!l.is_object() || !l.contains("gamma") || !l.contains("C"))
      throw ValidationError("each level needs 'gamma' and 'C'");
    LevelConfig lc;
    lc.gamma = json_number(l["gamma"], "level gamma");
    if (l["C"].is_string() && l["C"].get<std::string>() == "conservative")
      lc.C = std::nullopt;
    else
      lc.C = json_number(l["C"], "level C");
    c.levels.push_back(lc);
  }
  if (j.contains("support_radius"))
    c.support_radius = json_number(j["support_radius"], "support_radius");
  return c;
}

LadderConfig read_ladder_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cannot open class config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return parse_ladder_config(j);
}

json to_json(const LadderConfig& c)
{
  json j;
  j["V"] = c.v_one_based;
  j["norm"]["p"] = number_or_inf(c.norm.p);
  if (!c.norm.weights.empty())
    j["norm"]["weights"] = c.norm.weights;
  if (c.norm.basis)
    j["norm"]["basis"] = *c.norm.basis;
  j["levels"] = json::array();
  for (const auto& l : c.levels) {
    json e;
    e["gamma"] = l.gamma;
    if (l.C)
      e["C"] = *l.C;
    else
      e["C"] = "conservative";
    j["levels"].push_back(e);
  }
  if (c.support_radius)
    j["support_radius"] = *c.support_radius;
  return j;
}

std::vector<double> parse_vector(const std::string& text)
{
  std::vector<double> out;
  for (const auto& cell : split(text, ',')) {
    double v = 0.0;
    if (!parse_number(cell, v))
      throw ValidationError("'" + cell + "' is not a finite number");
    out.push_back(v);
  }
  return out;
}

std::vector<double> column_medians(const DataFile& data)
{
  std::vector<double> med(data.k);
  for (std::size_t j = 0; j < data.k; ++j) {
    std::vector<double> col(data.n());
    for (std::size_t i = 0; i < data.n(); ++i)
      col[i] = data.x[i * data.k + j];
    std::sort(col.begin(), col.end());
    const std::size_t n = col.size();
    med[j] = n % 2 ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
  }
  return med;
}

Ingested ingest(const DataFile& data, const IngestOptions& opts)
{
  const std::size_t k = data.k;
  const std::size_t n = data.n();
  std::vector<double> x0(k, 0.0);
  if (opts.x0) {
    if (opts.x0->size() != k)
      throw ValidationError("x0 has " + std::to_string(opts.x0->size()) +
                            " coordinates, data has " + std::to_string(k));
    x0 = *opts.x0;
  }
  std::vector<double> z(n * k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      z[i * k + j] = data.x[i * k + j] - x0[j];

  if (opts.basis) {
    const auto& B = *opts.basis;
    if (B.size() != k)
      throw ValidationError("basis must have k rows");
    for (const auto& r : B)
      if (r.size() != k)
        throw ValidationError("basis must be a k x k matrix");
    double dev = 0.0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        double s = 0.0;
        for (std::size_t c = 0; c < k; ++c)
          s += B[a][c] * B[b][c];
        dev = std::max(dev, std::abs(s - (a == b ? 1.0 : 0.0)));
      }
    if (dev > 1e-8)
      throw ValidationError("basis is not orthonormal (Gram deviation " + format_double(dev) +
                            ")");
    std::vector<double> rotated(n * k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < k; ++a) {
        double s = 0.0;
        for (std::size_t c = 0; c < k; ++c)
          s += B[a][c] * z[i * k + c];
        rotated[i * k + a] = s;
      }
    z = std::move(rotated);
  }

  Ingested out{Design::homoskedastic(k, std::vector<double>(k, 0.0)), {}, x0, false, {}, {}};
  std::vector<double> sigma;
  if (!data.sigma.empty()) {
    sigma = data.sigma;
  } else if (opts.estimate_sigma) {
    const double h = opts.bandwidth ? *opts.bandwidth : default_bandwidth(k, z);
    const VarianceEstimate est = estimate_sigma2(k, z, data.y, h, opts.threads);
    if (!(est.sigma2 > 0.0))
      throw NumericalError("estimated noise variance is zero");
    sigma.assign(n, std::sqrt(est.sigma2));
    out.sigma_estimated = true;
    out.variance = est;
  } else {
    throw ValidationError("data has no sigma column; pass --estimate-sigma or add one");
  }

  std::vector<double> coords;
  std::vector<double> sig;
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> p(z.data() + i * k, k);
    if (opts.support_radius) {
      if (!opts.support_norm)
        throw ValidationError("support restriction needs a norm");
      if ((*opts.support_norm)(p) > *opts.support_radius)
        continue;
    }
    coords.insert(coords.end(), p.begin(), p.end());
    out.y.push_back(data.y[i]);
    sig.push_back(sigma[i]);
    out.kept_rows.push_back(i);
  }
  if (out.y.empty())
    throw ValidationError("support restriction removed every observation");
  out.design = Design(k, std::move(coords), std::move(sig));
  return out;
}

MonotoneNorm build_norm(const NormConfig& cfg, std::size_t k)
{
  std::vector<double> w = cfg.weights.empty() ? std::vector<double>(k, 1.0) : cfg.weights;
  if (w.size() != k)
    throw ValidationError("norm weights have length " + std::to_string(w.size()) +
                          ", data has k = " + std::to_string(k));
  return MonotoneNorm(cfg.p, std::move(w));
}

ClassLadder build_ladder(const LadderConfig& cfg, const Design& design, std::span<const double> y)
{
  const std::size_t k = design.k();
  const MonotoneNorm norm = build_norm(cfg.norm, k);
  const IndexSet v = IndexSet::from_one_based(k, cfg.v_one_based);
  std::optional<double> conservative;
  std::vector<HolderClass> levels;
  for (const auto& l : cfg.levels) {
    double C = 0.0;
    if (l.C) {
      C = *l.C;
    } else {
      if (!conservative)
        conservative = conservative_c(design, y, cfg.levels.back().gamma, norm);
      C = *conservative;
    }
    levels.emplace_back(l.gamma, C, v, norm);
  }
  return ClassLadder(std::move(levels));
}

json to_json(const OneSidedBound& b, const ClassLadder& ladder)
{
  json j;
  j["j"] = b.level_index + 1;
  j["side"] = b.side == Side::lower ? "lower" : "upper";
  j["gamma"] = ladder.level(b.level_index).gamma();
  j["C"] = ladder.level(b.level_index).C();
  j["value"] = b.value;
  j["alpha"] = b.alpha;
  j["delta"] = b.delta;
  j["estimator"] = b.estimator;
  j["sd"] = b.sd;
  j["max_bias_halfwidth"] = b.max_bias_halfwidth;
  j["omega"] = b.omega;
  j["active_points"] = b.active_points;
  return j;
}

json to_json(const AdaptiveCI& ci, const ClassLadder& ladder)
{
  json j;
  j["lower"] = number_or_inf(ci.lower);
  j["upper"] = number_or_inf(ci.upper);
  j["length"] = number_or_inf(ci.length());
  j["empty"] = ci.empty;
  j["method"] = method_name(ci.method);
  j["tau"] = ci.tau;
  // per level: both sides together
  json levels = json::array();
  for (std::size_t lev = 0; lev < ladder.size(); ++lev) {
    json e;
    e["j"] = lev + 1;
    e["gamma"] = ladder.level(lev).gamma();
    e["C"] = ladder.level(lev).C();
    for (const auto& b : ci.per_level_bounds) {
      if (b.level_index != lev)
        continue;
      const char* side = b.side == Side::lower ? "lower" : "upper";
      e[side] = b.value;
      e[std::string("active_points_") + side] = b.active_points;
      e[std::string("omega_") + side] = b.omega;
      e[std::string("sd_") + side] = b.sd;
    }
    levels.push_back(e);
  }
  j["per_level"] = levels;
  if (ci.method == CiMethod::calibrated) {
    j["seed"] = ci.seed;
    j["mc_draws"] = ci.mc_draws;
  }
  j["skipped_levels"] = json::array();
  for (auto s : ci.skipped_levels)
    j["skipped_levels"].push_back(s + 1);
  j["diagnostics"] = ci.diagnostics;
  return j;
}

json to_json(const FixedLengthCI& ci)
{
  json j;
  j["lower"] = ci.lower();
  j["upper"] = ci.upper();
  j["length"] = ci.length();
  j["center"] = ci.center;
  j["half_length"] = ci.half_length;
  j["delta_opt"] = ci.delta_opt;
  j["omega"] = ci.omega;
  j["omega_prime"] = ci.omega_prime;
  j["level"] = ci.class_index + 1;
  j["method"] = "minimax";
  return j;
}

json to_json(const TauStar& t)
{
  json j;
  j["tau_star"] = t.tau;
  j["tau_naive"] = t.naive;
  j["exceedance"] = t.exceedance;
  j["fallback"] = t.fallback;
  j["mc_draws"] = t.mc_draws;
  j["seed"] = t.seed;
  j["warnings"] = t.warnings;
  return j;
}

json to_json(const SimReport& r)
{
  json j;
  j["name"] = r.name;
  j["truth"] = truth_name(r.truth);
  j["n"] = r.n;
  j["reps"] = r.reps;
  j["alpha"] = r.alpha;
  j["seed"] = r.seed;
  j["failed_reps"] = r.failed_reps;
  j["methods"] = json::array();
  for (const auto& m : r.methods) {
    json e;
    e["label"] = m.label;
    e["count"] = m.count;
    e["failures"] = m.failures;
    e["empty"] = m.empty;
    e["mean_length"] = m.mean_length;
    e["se_length"] = m.se_length;
    e["coverage"] = m.coverage;
    e["se_coverage"] = m.se_coverage;
    j["methods"].push_back(e);
  }
  if (r.calibration) {
    const auto& c = *r.calibration;
    json e;
    e["reps"] = c.reps;
    e["min_tau"] = c.min_tau;
    e["mean_tau"] = c.mean_tau;
    e["naive_tau"] = c.naive_tau;
    e["below_naive"] = c.below_naive;
    e["containment_violations"] = c.containment_violations;
    e["max_containment_excess"] = number_or_inf(c.max_containment_excess);
    j["calibration"] = e;
  }
  return j;
}

SimReport sim_report_from_json(const json& j)
{
  SimReport r;
  r.name = j.at("name").get<std::string>();
  const std::string t = j.at("truth").get<std::string>();
  r.truth = t == "f1" ? Truth::f1 : t == "f2" ? Truth::f2 : Truth::f3;
  r.n = j.at("n").get<std::size_t>();
  r.reps = j.at("reps").get<std::size_t>();
  r.alpha = j.at("alpha").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.failed_reps = j.at("failed_reps").get<std::size_t>();
  for (const auto& e : j.at("methods")) {
    MethodSummary m;
    m.label = e.at("label").get<std::string>();
    m.count = e.at("count").get<std::size_t>();
    m.failures = e.at("failures").get<std::size_t>();
    m.empty = e.at("empty").get<std::size_t>();
    m.mean_length = e.at("mean_length").get<double>();
    m.se_length = e.at("se_length").get<double>();
    m.coverage = e.at("coverage").get<double>();
    m.se_coverage = e.at("se_coverage").get<double>();
    r.methods.push_back(m);
  }
  if (j.contains("calibration")) {
    const json& e = j["calibration"];
    CalibrationSummary c;
    c.reps = e.at("reps").get<std::size_t>();
    c.min_tau = e.at("min_tau").get<double>();
    c.mean_tau = e.at("mean_tau").get<double>();
    c.naive_tau = e.at("naive_tau").get<double>();
    c.below_naive = e.at("below_naive").get<std::size_t>();
    c.containment_violations = e.at("containment_violations").get<std::size_t>();
    c.max_containment_excess = json_number(e.at("max_containment_excess"), "excess");
    r.calibration = c;
  }
  return r;
}

json to_json(const RateCheckResult& r)
{
  json j;
  j["ns"] = r.ns;
  j["omega"] = r.omega;
  j["slope"] = r.slope;
  j["theory"] = r.theory;
  j["relative_error"] = r.relative_error;
  return j;
}

std::string fnv1a64_hex(const std::string& bytes)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const RunRecord& r)
{
  json j;
  j["command"] = r.command;
  j["arguments"] = r.arguments;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["version"] = r.version;
  j["outputs"] = r.outputs;
  return j;
}

RunRecord run_record_from_json(const json& j)
{
  RunRecord r;
  r.command = j.at("command").get<std::string>();
  r.arguments = j.at("arguments");
  r.config_hash = j.at("config_hash").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.version = j.at("version").get<std::string>();
  r.outputs = j.at("outputs");
  return r;
}

std::string library_version()
{
  return "adaptci 0.1.0";
}

} // namespace adaptci
