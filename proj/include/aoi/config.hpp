#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "aoi/analysis.hpp"
#include "aoi/oracle.hpp"
#include "aoi/simulator.hpp"

namespace aoi {

/// Everything one JSON config file describes. The schema lives in
/// schema/run_config.schema.json.
struct ExperimentConfig {
  RunConfig run;
  OracleOptions oracle;
  std::size_t n_seeds = 1;
  std::vector<std::uint64_t> checkpoints;
  std::vector<PolicySpec> variants;
  unsigned workers = 0;

  /// Ensemble description with the oracle reference left unset.
  EnsembleSpec ensemble() const;
};

DelayDistribution parse_delay(const nlohmann::json& j);
ChannelParams parse_channel(const nlohmann::json& j);
FrequencyCap parse_frequency_cap(const nlohmann::json& j, const ChannelParams& channel);
MomentPriors parse_priors(const nlohmann::json& j);
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const OracleSolution& s);
nlohmann::json to_json(const RunSummary& s);

} // namespace aoi
