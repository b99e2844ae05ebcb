#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aoi/channel.hpp"
#include "aoi/frequency.hpp"
#include "aoi/learner.hpp"

namespace aoi {

/// i.i.d. epoch draws reused across every threshold a solver evaluates
/// (common random numbers). Epoch i comes from stream (crn_seed, i).
struct DelayPool {
  std::vector<double> d_f; // forward delay of the successful attempt
  std::vector<double> d_a;
  std::vector<double> d_v;
  std::vector<std::uint32_t> M;

  std::size_t size() const { return d_a.size(); }
};

DelayPool draw_delay_pool(const ChannelParams& params, std::size_t n, std::uint64_t crn_seed);

struct GbarEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Plain Monte-Carlo average of g_nu(gamma; D_a, D_v) over the pool.
GbarEstimate estimate_gbar(double gamma, double nu, const DelayPool& pool);
GbarEstimate estimate_gbar(double gamma, double nu, const ChannelParams& params, std::size_t n,
                           std::uint64_t crn_seed);

/// E[max{D_a, theta}] and E[max{D_a, theta}^2].
struct ThresholdExpectations {
  double e_max = 0.0;
  double e_max2 = 0.0;
};

/// Closed form for channels whose forward and backward laws are
/// deterministic or uniform. Throws InvalidParameter otherwise.
ThresholdExpectations threshold_expectations_exact(const ChannelParams& params, double theta);

struct OracleOptions {
  std::size_t n = 1'000'000;
  double tol = 1e-4;
  std::uint64_t crn_seed = 0x0AC1E5EEDull;
  /// Use the closed-form threshold expectations when the channel allows it.
  bool prefer_exact = true;
};

struct OracleSolution {
  double gamma_star = 0.0;
  double nu_star = 0.0;
  double theta_star = 0.0;
  double aoi_opt = 0.0;
  double L_star = 0.0;
  std::size_t n_samples = 0; // 0 when everything was closed form
  double ci_halfwidth = 0.0; // 95% half-width on gamma_star
  double aoi_std_error = 0.0;
  std::string method;
};

/// Evaluates the renewal quantities of a threshold policy for one channel,
/// exactly for box laws and by control-variate Monte Carlo otherwise:
/// E[max{D_a,t}] = E[D_a] + E[(t - D_a)^+] keeps the estimator bounded even
/// for heavy-tailed delays.
class ThresholdModel {
public:
  ThresholdModel(const ChannelParams& params, const OracleOptions& opts);

  const ChannelMoments& moments() const { return moments_; }
  bool exact() const { return exact_; }
  std::size_t n_samples() const { return exact_ ? 0 : pool_.size(); }

  ThresholdExpectations expectations(double theta) const;
  /// Mean epoch length E[max{D_a, theta}] + E[D_v].
  double mean_length(double theta) const;
  /// gbar_nu(gamma) + N.
  double stationarity(double gamma, double nu) const;
  /// Time-average AoI of the fixed threshold theta.
  double aoi(double theta) const;
  /// Standard error of stationarity(gamma, theta - gamma) at fixed theta.
  double stationarity_std_error(double gamma, double theta) const;

private:
  ChannelParams params_;
  ChannelMoments moments_;
  bool exact_ = false;
  DelayPool pool_;
};

OracleSolution solve_unconstrained(const ChannelParams& params, const OracleOptions& opts = {});
OracleSolution solve_constrained(const ChannelParams& params, FrequencyCap f_max,
                                 const OracleOptions& opts = {});

/// Independent renewal-reward oracle: for each theta, simulate a chain of
/// epochs and take sum F_k / sum L_k with F_k = D^F_k L_{k-1} + L_k^2 / 2.
/// Returns the feasible argmin over the grid.
struct GridPoint {
  double theta = 0.0;
  double aoi = 0.0;
  double std_error = 0.0;
  double mean_interval = 0.0; // sum L / sum M
};

struct GridResult {
  OracleSolution best;
  std::vector<GridPoint> points;
};

GridResult grid_bruteforce(const ChannelParams& params, FrequencyCap f_max,
                           std::span<const double> theta_grid, std::size_t n, std::uint64_t seed);

std::vector<double> make_grid(double lo, double hi, double step);

} // namespace aoi
