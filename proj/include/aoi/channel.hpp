#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoi/rng.hpp"

namespace aoi {

enum class DelayKind { deterministic, uniform, lognormal, exponential };

/// How a hard upper cap is enforced.
///   reject: condition the law on X <= cap (shape preserved, sampled by
///           inverse CDF so the draw count stays fixed).
///   clamp:  X = min(X, cap), which puts an atom at the cap.
enum class Truncation { reject, clamp };

/// A one-sided delay law X = floor + T(Y), where Y is one of the base kinds
/// and T is the optional truncation applied to the shifted value.
class DelayDistribution {
public:
  static DelayDistribution deterministic(double value);
  static DelayDistribution uniform(double lo, double hi);
  static DelayDistribution lognormal(double mu, double sigma);
  static DelayDistribution exponential(double rate);

  /// Shift the support to start at `epsilon` (epsilon >= 0).
  DelayDistribution with_floor(double epsilon) const;
  /// Cap samples at `upper` (on the shifted scale).
  DelayDistribution truncated(double upper, Truncation mode = Truncation::reject) const;
  /// Cap at the p-quantile of the current untruncated law.
  DelayDistribution truncated_at_quantile(double p, Truncation mode = Truncation::reject) const;

  double sample(RngStream& rng) const;

  double mean() const;
  double second_moment() const;
  double variance() const { return second_moment() - mean() * mean(); }

  /// Quantile of the untruncated, shifted law.
  double quantile(double p) const;

  DelayKind kind() const { return kind_; }
  double param1() const { return p1_; }
  double param2() const { return p2_; }
  double epsilon_floor() const { return floor_; }
  std::optional<double> truncation_upper() const { return cap_; }
  Truncation truncation_mode() const { return mode_; }

  /// Supremum of the support, if finite.
  std::optional<double> support_upper() const;
  /// True for deterministic/uniform laws whose truncation does not bind;
  /// these admit closed-form threshold expectations.
  bool is_box() const;
  /// Endpoints [lo, hi] of a box law (lo == hi for a point mass).
  std::pair<double, double> box() const;

  std::string describe() const;

private:
  DelayDistribution(DelayKind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {}

  // Base-law helpers (before shift and truncation).
  double base_cdf(double y) const;
  double base_quantile(double p) const;
  double base_partial_moment(int n, double c) const; // E[Y^n; Y <= c]
  double base_moment(int n) const;
  // Moments of T(Y) where T applies the cap y_cap = cap - floor.
  double truncated_moment(int n) const;

  DelayKind kind_;
  double p1_;
  double p2_;
  double floor_ = 0.0;
  std::optional<double> cap_;
  Truncation mode_ = Truncation::reject;
  double cap_mass_ = 1.0; // P(Y <= cap - floor), cached
};

inline constexpr std::uint32_t kDefaultAttemptCap = 10000;

struct ChannelParams {
  double alpha = 0.0;
  DelayDistribution fwd = DelayDistribution::deterministic(1.0);
  DelayDistribution bwd = DelayDistribution::deterministic(1.0);
  std::uint32_t m_cap = kDefaultAttemptCap;

  /// Throws InvalidParameter unless 0 <= alpha < 1 and m_cap >= 1.
  void validate() const;
  std::string describe() const;
};

struct Attempt {
  double d_f = 0.0;
  double d_b = 0.0;
  double round_trip() const { return d_f + d_b; }
};

/// One renewal epoch: the successful first attempt and the failed retries
/// that follow it. W and L are filled by the simulator.
struct EpochOutcome {
  std::uint64_t index = 0;
  Attempt first_attempt;
  std::vector<Attempt> failed_attempts;
  std::uint32_t M = 1;
  double D_a = 0.0;
  double D_v = 0.0;
  double W = 0.0;
  double L = 0.0;

  void set_wait(double wait) {
    W = wait;
    L = D_a + W + D_v;
  }
};

double draw_delay(const DelayDistribution& dist, RngStream& rng);

/// Draws one epoch from `rng`: d_f and d_b of the successful attempt first,
/// then for each retry one uniform for the loss event followed by its d_f, d_b.
EpochOutcome sample_epoch(const ChannelParams& params, RngStream& rng, std::uint64_t index = 0);

struct ChannelMoments {
  double mean_DF = 0.0;
  double mean_DB = 0.0;
  double mean_Da = 0.0;
  double m2_Da = 0.0;
  double mean_M = 1.0;
  double mean_Dv = 0.0;
  double m2_Dv = 0.0;

  /// N = E[Dv^2]/2 - E[Dv]^2.
  double n_const() const { return 0.5 * m2_Dv - mean_Dv * mean_Dv; }
};

/// Closed-form moments. Dv is a compound-geometric sum with N = M - 1
/// retries, so E[Dv^2] = E[N] m2_Da + E[N(N-1)] mean_Da^2. The attempt cap
/// is ignored here.
ChannelMoments analytic_moments(const ChannelParams& params);

/// Standard normal CDF and quantile.
double normal_cdf(double x);
double normal_quantile(double p);

} // namespace aoi
