#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace outlier {

inline constexpr int kSchemaVersion = 1;

struct Grid {
  double min = 0.0;
  double max = 0.0;
  int points = 0;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Parsed configuration shared by all subcommands. JSON keys match the flag
/// names without the leading dashes.
struct RunConfig {
  std::vector<double> potential{0.0, 0.0, 0.5};
  std::optional<double> a;
  std::optional<int> n;
  std::optional<int> r;
  int trials = 2000;
  std::uint64_t seed = 12345;
  int precision_bits = 256;
  std::optional<Grid> grid;
  std::vector<Range> counts;
  std::optional<double> threshold;
  std::string against = "mc";
  std::optional<std::string> regime;
  std::optional<std::string> sweep;
  std::string out;
  std::string format = "json";
  bool force = false;
  bool timing = false;

  nlohmann::json to_json() const;
  // Keys present in `j` override the current values.
  void merge_json(const nlohmann::json& j);
};

Grid parse_grid(const std::string& spec);
Range parse_range(const std::string& spec);

struct CommandOutput {
  nlohmann::json report;
  std::string csv;  // filled when the command produces a grid
};

CommandOutput cmd_analyze(const RunConfig& cfg);
CommandOutput cmd_predict(const RunConfig& cfg);
CommandOutput cmd_oracle(const RunConfig& cfg);
CommandOutput cmd_mc(const RunConfig& cfg);
CommandOutput cmd_compare(const RunConfig& cfg);

/// Full command-line entry point. Exit codes: 0 success, 1 usage or
/// configuration error, 2 mathematical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace outlier
