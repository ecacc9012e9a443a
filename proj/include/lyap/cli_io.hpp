#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lyap/monte_carlo.hpp"
#include "lyap/rng.hpp"

// Command-line front end: experiment configuration (flags and/or a JSON
// config file with flag-named keys; flags win), figure presets, and
// bit-stable CSV/JSON emission.

namespace lyap::cli {

enum class Command { simulate, density, compare, positions, limits, spacing };
enum class OutputFormat { csv, json };

struct GridSpec {
  double lo = 0, hi = 1;
  int n_points = 200;
};

struct ExperimentConfig {
  Command command = Command::simulate;
  rng::EnsembleSpec ensemble;
  mc::EvMethod ev_method = mc::EvMethod::gamma_product;
  std::string model = "gaussian";
  GridSpec grid;
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::csv;
  std::string preset;
  bool no_timestamp = false;
  bool emit_plot_script = false;
  bool rescale_sqrt_n = false;  // compare against the triangular law
  int threads = 0;
  int n_bins = 60;
  double tolerance = 0.05;
  long limits_t = 10000;  // t used for the Fuss-Catalan moment route
};

// Thrown for malformed configuration; carries the process exit code.
struct CliError : std::runtime_error {
  int exit_code;
  explicit CliError(const std::string& msg, int code = 1)
      : std::runtime_error(msg), exit_code(code) {}
};

/// Parses argv-style tokens (without the program name). A `--config file`
/// option loads JSON defaults that explicit flags override; unknown flags or
/// keys are rejected.
ExperimentConfig parse_config(const std::vector<std::string>& args);

/// Executes a parsed config, writing artifacts under config.out_dir.
/// Returns 0 on success and 2 when a compare run misses its tolerance.
int run(const ExperimentConfig& config);

// CSV with '#'-prefixed key=value metadata, a column-header row and
// 17-significant-digit data rows (bit-exact round trips).
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const CsvTable& table, bool with_timestamp);
CsvTable read_csv(const std::string& path);

}  // namespace lyap::cli
