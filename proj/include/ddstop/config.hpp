#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ddstop/drift.hpp"
#include "ddstop/experiments.hpp"
#include "ddstop/oracle.hpp"
#include "ddstop/payoff.hpp"

namespace ddstop::config {

using Json = nlohmann::json;

/// Parses a JSON file. Throws ConfigError (key "") for unreadable or malformed files.
Json load(const std::string& path);

/// 64-bit FNV-1a of the canonical dump (keys sorted, no whitespace), as 16
/// hex digits. Stable under key reordering.
std::string hash(const Json& config);
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Section accessors. Every failure throws ConfigError with the dotted key path.
const Json& section(const Json& config, std::string_view name);
double number(const Json& obj, std::string_view path, std::string_view key);
double number_or(const Json& obj, std::string_view path, std::string_view key, double fallback);
std::string text_or(const Json& obj, std::string_view path, std::string_view key, std::string fallback);

/// {"name": "ou" | "piecewise_margin" | "piecewise_general" | "tabulated", ...}
DriftSpec parse_drift(const Json& drift);

/// {"name": "sim_tent" | "margin_tent" | "two_peak" | "tabulated", "y1", "zeta", ...}.
/// Analytic families take xi from `reference`. `beta_override` replaces the
/// sim_tent exponent.
PayoffSpec parse_payoff(const Json& payoff, const DriftSpec& reference,
                        std::optional<double> beta_override = std::nullopt);

/// A list, {"log_e": [lo, hi], "n": k} (k points log-spaced from e^lo to e^hi)
/// or {"linear": [lo, hi], "n": k}.
std::vector<double> parse_T_grid(const Json& grid, std::string_view path);

/// Reads the "experiment" section; drift and payoff are filled by the caller.
ExperimentConfig parse_experiment(const Json& experiment);

/// Margin exponents to sweep: experiment.betas, else [experiment.beta].
std::vector<double> parse_betas(const Json& experiment);

StrategyParams parse_strategy(const Json& config);

HypothesisMode parse_mode(const Json& hypotheses);

}  // namespace ddstop::config
