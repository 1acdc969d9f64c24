#pragma once

#include "adaptci/ci_adaptive.hpp"
#include "adaptci/design.hpp"
#include "adaptci/function_class.hpp"
#include "adaptci/minimax_ci.hpp"
#include "adaptci/modulus.hpp"
#include "adaptci/simulate.hpp"
#include "adaptci/variance.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace adaptci {

using json = nlohmann::json;

//! Shortest decimal string that parses back to the same double.
std::string format_double(double v);

//! Raw CSV table with header x1,...,xk,y[,sigma].
struct DataFile {
  std::string path;
  std::size_t k = 0;
  std::vector<double> x; // n x k row-major
  std::vector<double> y;
  std::vector<double> sigma; // empty when the file has no sigma column

  std::size_t n() const { return y.size(); }
};

DataFile read_csv(const std::string& path);
DataFile parse_csv(const std::string& text, const std::string& source = "<memory>");

struct NormConfig {
  double p = 2.0;
  std::vector<double> weights; // empty: all ones
  std::optional<std::vector<std::vector<double>>> basis; // rows of an orthonormal matrix
};

struct LevelConfig {
  double gamma = 1.0;
  std::optional<double> C; // nullopt: conservative rule
};

struct LadderConfig {
  std::vector<std::size_t> v_one_based;
  NormConfig norm;
  std::vector<LevelConfig> levels;
  std::optional<double> support_radius; // keep points with ||x - x0|| <= radius
};

LadderConfig parse_ladder_config(const json& j);
LadderConfig read_ladder_config(const std::string& path);
json to_json(const LadderConfig& c);

struct IngestOptions {
  std::optional<std::vector<double>> x0;
  std::optional<std::vector<std::vector<double>>> basis;
  bool estimate_sigma = false;
  std::optional<double> bandwidth;
  std::optional<double> support_radius;
  std::optional<MonotoneNorm> support_norm;
  unsigned threads = 1;
};

struct Ingested {
  Design design;
  std::vector<double> y;
  std::vector<double> x0;
  bool sigma_estimated = false;
  std::optional<VarianceEstimate> variance;
  std::vector<std::size_t> kept_rows; // rows surviving the support restriction
};

//! Translates by -x0, rotates into the basis (z = B (x - x0)), restricts the support
//! and fills sigma from the file or from the kernel variance estimate.
Ingested ingest(const DataFile& data, const IngestOptions& opts);

std::vector<double> parse_vector(const std::string& text);
std::vector<double> column_medians(const DataFile& data);

//! Resolves conservative constants (2 max |dy| / ||dx||^gamma_J over the design).
ClassLadder build_ladder(const LadderConfig& cfg, const Design& design, std::span<const double> y);
MonotoneNorm build_norm(const NormConfig& cfg, std::size_t k);

json to_json(const OneSidedBound& b, const ClassLadder& ladder);
json to_json(const AdaptiveCI& ci, const ClassLadder& ladder);
json to_json(const FixedLengthCI& ci);
json to_json(const TauStar& t);
json to_json(const SimReport& r);
json to_json(const RateCheckResult& r);
SimReport sim_report_from_json(const json& j);

//! Everything needed to replay a CLI run.
struct RunRecord {
  std::string command;
  json arguments;
  std::string config_hash; // FNV-1a 64 of the canonical arguments and input bytes
  std::uint64_t seed = 0;
  std::string version;
  json outputs;
};

std::string fnv1a64_hex(const std::string& bytes);
json to_json(const RunRecord& r);
RunRecord run_record_from_json(const json& j);

std::string library_version();

} // namespace adaptci
