#ifndef NELSIM_RUN_HPP
#define NELSIM_RUN_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nelsim/bell.hpp"
#include "nelsim/scenarios.hpp"

namespace nelsim {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kFormatVersion = "1";

struct BellScanConfig {
  bell::CutoffModel model;
  bell::AngleSet angles;
  std::vector<double> separations;  // sorted ascending, all > 0
  double bound = 2.0;
};

/// One fully parsed experiment run. Parsed strictly: unknown keys, missing
/// required keys, and out-of-range values all raise ConfigError with the
/// offending path in the message.
struct RunConfig {
  std::string experiment;  // evolve | born | lambda_sweep | bell_scan
  std::uint64_t seed = 0;
  std::string output_dir = ".";

  Scenario scenario;                  // evolve, born, lambda_sweep
  std::vector<double> lambda_values;  // lambda_sweep
  std::size_t n_particles = 0;        // born
  std::size_t n_bins = 0;             // born
  std::size_t sde_substeps = 0;       // born; defaults to record_every
  BellScanConfig bell;                // bell_scan
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Output directory priority: CLI flag, then NELSIM_OUTPUT_DIR, then the
/// config entry. cli_value empty means the flag was not given.
std::string resolve_output_dir(const RunConfig& cfg, const std::string& cli_value);

/// Execute the configured experiment and write summary.json, the series CSV
/// files, and run.log into output_dir (created if needed). Identical configs
/// and seeds give byte-identical summary and series files; wall-clock timing
/// goes only to run.log. Throws ConfigError / DivergenceError on failure.
void run_experiment(const RunConfig& cfg, const std::string& output_dir, bool quiet);

}  // namespace nelsim

#endif
