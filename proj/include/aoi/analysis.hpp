#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoi/oracle.hpp"
#include "aoi/simulator.hpp"

namespace aoi {

struct EnsembleSpec {
  RunConfig base;
  std::size_t n_seeds = 20;
  std::vector<std::uint64_t> checkpoints;
  /// Policy variants co-run over identical seeds; empty means base.policy.
  std::vector<PolicySpec> variants;
  /// Reference for squared error and regret columns.
  std::optional<OracleSolution> oracle;
  /// Worker threads; 0 reads AOI_WORKERS, then hardware concurrency.
  unsigned workers = 0;

  void validate() const;
};

/// One (variant, seed, checkpoint) observation.
struct SeedRow {
  std::string variant;
  std::uint64_t seed = 0;
  std::uint64_t K = 0;
  double aoi = 0.0;
  double gamma = 0.0;
  double sq_err = 0.0;
  double regret = 0.0;
  double interval = 0.0;
  std::string channel;
};

struct SummaryRow {
  std::string variant;
  std::uint64_t K = 0;
  std::size_t n = 0;
  double aoi_mean = 0.0, aoi_std = 0.0;
  double gamma_mean = 0.0, gamma_std = 0.0;
  double sq_err_mean = 0.0, sq_err_std = 0.0;
  double regret_mean = 0.0, regret_std = 0.0;
  double interval_mean = 0.0, interval_std = 0.0;
};

struct EnsembleTable {
  std::vector<SeedRow> per_seed;
  std::vector<SummaryRow> summary;
};

/// Seed used for replicate i; identical across variants so that every
/// variant sees the same channel draws.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t i);

unsigned resolve_workers(unsigned requested);

/// Mean and sample standard deviation per (variant, K), ordered by variant
/// then K. Throws MixedChannels if rows disagree on the channel.
std::vector<SummaryRow> aggregate(std::vector<SeedRow> rows);

EnsembleTable run_ensemble(const EnsembleSpec& spec);

struct FitReport {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n_points = 0;
};

/// Ordinary least squares y = intercept + slope x.
FitReport fit_line(const std::vector<double>& x, const std::vector<double>& y);

enum class FitQuantity { mse_gamma, regret_over_lnK };

FitQuantity parse_fit_quantity(const std::string& text);

/// mse_gamma: log(mean sq_err) against log K. regret_over_lnK: mean regret
/// against ln K. Rows must belong to one variant.
FitReport fit_error_decay(const std::vector<SummaryRow>& rows, FitQuantity quantity);

struct CompareRow {
  std::uint64_t K = 0;
  std::size_t n = 0;
  double std_a = 0.0, std_b = 0.0;
  double mse_a = 0.0, mse_b = 0.0;
  /// std_b / std_a and mse_b / mse_a; empty when the denominator vanishes.
  std::optional<double> std_ratio;
  std::optional<double> mse_ratio;
};

/// Paired comparison of two single-variant per-seed tables (e.g. vanilla as
/// `a`, momentum as `b`). Throws UnpairedSeeds unless both cover the same
/// (seed, K) set, MixedChannels if the channels differ.
std::vector<CompareRow> compare_variance(const std::vector<SeedRow>& a, const std::vector<SeedRow>& b);

} // namespace aoi
