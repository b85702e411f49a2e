#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace vbsq {

using Json = nlohmann::ordered_json;

inline constexpr const char* kArtifactVersion = "0.1.0";

// Invalid configuration; field() names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  std::string experiment;
  Json params;  // experiment parameters with defaults filled in
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir = "out";
};

std::vector<std::string> experiment_names();
Json default_params(const std::string& experiment);

// Accepts a plain config object or a manifest (its "config" member).
// Unknown experiments and keys are rejected.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

// Everything that determines results.csv; threads and output_dir excluded.
Json config_echo(const ExperimentConfig& cfg);

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Stage {
  std::string name;
  double seconds = 0.0;
};

struct ExperimentResult {
  Table table;
  Json summary = Json::object();
  std::vector<Stage> stages;
  std::string plot;  // gnuplot script reading results.csv
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// printf %.17g; nan and inf spelled out.
std::string format_double(double x);
std::string format_cell(const Cell& c);
std::string csv_header(const Table& t);
std::string csv_row(const std::vector<Cell>& row);
std::string format_csv(const Table& t);

std::uint64_t fnv1a(std::string_view s);
std::string hex64(std::uint64_t h);

Json make_manifest(const ExperimentConfig& cfg, const ExperimentResult& r, double wall_seconds);

// Runs, writes results.csv, manifest.json, plot.gp into cfg.output_dir.
// Returns 0 on success; diagnostics go to err.
int run_to_directory(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace vbsq
