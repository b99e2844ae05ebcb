#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aoi/channel.hpp"
#include "aoi/frequency.hpp"
#include "aoi/learner.hpp"
#include "aoi/oracle.hpp"
#include "aoi/policy.hpp"

namespace aoi {

enum class PolicyKind { online, online_momentum, constant_wait, zero_wait, fixed_threshold };

struct PolicySpec {
  PolicyKind kind = PolicyKind::online;
  double theta = 0.0; // fixed_threshold only

  /// "online", "online_momentum", "constant_wait", "zero_wait",
  /// "fixed_threshold(<theta>)".
  std::string name() const;
  static PolicySpec parse(const std::string& text);
  bool learns() const { return kind == PolicyKind::online || kind == PolicyKind::online_momentum; }
};

enum class PriorMode {
  exact,     // moment bounds equal to the channel's true moments
  specified, // caller-supplied MomentPriors
  none,      // bounds [0, Q] and D_lb estimated from a zero-wait warm-up
};

struct LearnerPriorsSpec {
  PriorMode mode = PriorMode::exact;
  MomentPriors priors;
  std::uint64_t warmup_epochs = 100;
  double cap_factor = 10.0;
};

struct RunConfig {
  ChannelParams channel;
  PolicySpec policy;
  std::uint64_t horizon_epochs = 1000;
  FrequencyCap f_max = FrequencyCap::unlimited();
  double V = 50.0;
  std::uint64_t seed = 1;
  LearnerPriorsSpec priors;
  double momentum_a = 0.005;
  double gamma0 = 0.0;
  std::uint64_t trace_stride = 1;
  /// Epochs recorded in addition to every trace_stride-th one.
  std::vector<std::uint64_t> checkpoints;
  /// Measure averages and regret from S_2 instead of t = 0.
  bool exclude_warmup = false;
  /// When set, records carry running regret against this AoI_opt.
  std::optional<double> aoi_reference;
  /// Keep every EpochOutcome (for independent re-integration in tests).
  bool keep_epochs = false;

  void validate() const;
};

struct EpochRecord {
  std::uint64_t k = 0;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double nu = 0.0;
  double U = 0.0;
  std::uint32_t M = 1;
  double D_a = 0.0;
  double D_v = 0.0;
  double W = 0.0;
  double L = 0.0;
  double F = 0.0;
  double S_next = 0.0;  // S_{k+1}, sampling instant of the next success
  double cum_aoi = 0.0; // integral of A(t) over [0, S_{k+1}]
  double regret = std::numeric_limits<double>::quiet_NaN();
  double time_avg_aoi = 0.0;
  double mean_interval = 0.0; // elapsed time / samples taken
  std::uint64_t samples = 0;
};

struct RunSummary {
  std::uint64_t epochs = 0;
  double time_avg_aoi = 0.0;
  double mean_sampling_interval = 0.0;
  double final_gamma = std::numeric_limits<double>::quiet_NaN();
  double final_nu = 0.0;
  double regret = std::numeric_limits<double>::quiet_NaN();
  double elapsed = 0.0;
  double cum_aoi = 0.0;
  std::uint64_t total_samples = 0;
  /// Portion before S_2: [0, S_1) plus the first epoch.
  double warmup_area = 0.0;
  double warmup_time = 0.0;
  std::uint64_t warmup_samples = 0;
  std::optional<GammaBounds> bounds;
};

struct RunResult {
  std::vector<EpochRecord> records;
  RunSummary summary;
  /// Filled when RunConfig::keep_epochs: warm-up draw first (index 0), whose
  /// failed attempts precede the first success, then epochs 1..K.
  std::vector<EpochOutcome> epochs;
};

/// Area under A(t) over one epoch: d_f_first * L_prev + L_curr^2 / 2.
double epoch_aoi(double d_f_first, double L_prev, double L_curr);

RunResult run(const RunConfig& config);

/// Running regret integral_0^{S_{k+1}} A - AoI_opt * S_{k+1} for each record
/// (or from S_2 when exclude_warmup).
std::vector<double> regret(const RunResult& result, const OracleSolution& oracle, bool exclude_warmup = false);

} // namespace aoi
