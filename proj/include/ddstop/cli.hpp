#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddstop/experiments.hpp"

namespace ddstop::cli {

inline constexpr std::string_view kVersion = "0.1.0";

/// Environment variable naming the output directory when --out is absent.
inline constexpr std::string_view kOutDirEnv = "DDSTOP_OUT_DIR";

struct RunOptions {
  std::string config_path;
  /// Empty: $DDSTOP_OUT_DIR, else "out".
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct RunManifest {
  std::string config_hash;
  std::string subcommand;
  std::uint64_t master_seed = 0;
  std::string version{kVersion};
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
  bool ok = false;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand. Outputs and manifest.json land in the output
/// directory; failures also write error.json and print it to stderr.
/// Returns 0 on success, 2 for ConfigError, 1 for any other error.
int run(std::string_view subcommand, const RunOptions& options);

enum class FigureMode { LogLog, SemiLog };

/// Columns x, y, beta, n_reps, stderr with one row per (beta, T) over the
/// successful records: x = log T (loglog) or T (semilog), y = log mean
/// regret, stderr = standard error of y by the delta method (SE of the mean
/// over the mean). Throws EmptyInput.
std::string emit_figure_data(std::span<const RegretRecord> records, FigureMode mode);

/// T, beta, replication, y_hat, regret, seed (+ ok, error).
std::string regret_records_csv(std::span<const RegretRecord> records);
std::string cumulative_records_csv(std::span<const CumulativeRecord> records);
/// T, beta, n, mean, median, stderr.
std::string summary_csv(std::span<const HorizonSummary> rows);

}  // namespace ddstop::cli
