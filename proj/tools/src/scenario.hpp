#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace qlab {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> omega_min;
  std::optional<double> omega_max;
  std::optional<std::size_t> omega_points;
  unsigned threads = 0;
};

struct RunResult {
  Table table;
  nlohmann::json derived = nlohmann::json::object();
  std::vector<std::string> warnings;
};

/// Apply command-line grid and seed overrides to a copy of the config.
Config with_overrides(const Config& cfg, const RunOptions& opt);

/// Validate every section and key for the scenario kind without computing anything.
void validate_scenario(const Config& cfg);

RunResult run_scenario(const Config& cfg, const RunOptions& opt = {});

/// One run per value of [params] `param`, concatenated with a leading parameter column.
RunResult sweep_scenario(const Config& cfg, const std::string& param, const std::vector<double>& values,
                         const RunOptions& opt = {});

struct StabilityResult {
  bool stable = false;
  double max_real_part = 0;
  std::vector<std::pair<double, double>> eigenvalues;
  std::string system;
};

/// Stability verdict for every curve of the scenario.
std::vector<StabilityResult> check_stability(const Config& cfg);

/// Experimental-parameter derivation from a parametric config; `consistent` lives in the json.
nlohmann::json derive_experiment(const Config& cfg);

}  // namespace qlab
