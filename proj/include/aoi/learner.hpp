#pragma once

#include <cstdint>
#include <optional>

#include "aoi/channel.hpp"
#include "aoi/frequency.hpp"

namespace aoi {

/// Prior knowledge about the channel: bounds on the means of DF, DB, Dv, an
/// upper bound on E[(DF + DB + Dv)^2], and optional hard support bounds.
struct MomentPriors {
  double DF_mean_lb = 0.0;
  double DF_mean_ub = 0.0;
  double DB_mean_lb = 0.0;
  double DB_mean_ub = 0.0;
  double Dv_mean_lb = 0.0;
  double Dv_mean_ub = 0.0;
  double H_ub = 0.0;
  std::optional<double> DF_max;
  std::optional<double> DB_max;
  std::optional<std::uint32_t> M_max;
};

/// Priors that are exact: lower and upper mean bounds both equal the true
/// moments. Hard bounds come from finite supports and the attempt cap.
MomentPriors priors_from_channel(const ChannelParams& params);

struct GammaBounds {
  double gamma_lb = 0.0;
  double gamma_ub = 0.0;
  double D_bar_lb = 1.0;
  /// gamma_ub + M_max (DF_max + DB_max); empty without hard bounds.
  std::optional<double> L_ub;

  double project(double gamma) const;
};

GammaBounds gamma_bounds_from_priors(const MomentPriors& priors, FrequencyCap f_max);

/// g = 1/2 max{D_a, gamma+nu}^2 - gamma (max{D_a, gamma+nu} + D_v).
double eval_g(double gamma, double nu, double d_a, double d_v);

/// eta_1 = 1/(2 D_lb); eta_k = 1/((k+2) D_lb) for k >= 2.
double step_size(std::uint64_t k, double D_bar_lb);

/// (1 - a) d_prev + a B.
double momentum_step(double d_prev, double a, double drive);

struct LearnerSettings {
  double V = 50.0;
  bool momentum = false;
  double momentum_a = 0.005;
  double gamma0 = 0.0; // projected into the bounds
};

struct LearnerState {
  std::uint64_t k = 0;
  double gamma = 0.0;
  double mu = 0.0;
  double m = 0.0;
  double U = 0.0;
  double nu = 0.0;
  double V = 50.0;
  double momentum_d = 0.0;
  double momentum_a = 0.005;
  bool momentum_enabled = false;
  GammaBounds bounds;
  double last_drive = 0.0; // B_k of the latest update

  double threshold() const { return gamma + nu; }
  /// N_k = m/2 - mu^2.
  double n_estimate() const { return 0.5 * m - mu * mu; }
};

LearnerState initial_learner_state(const GammaBounds& bounds, const LearnerSettings& settings);

/// Quantities of the just-finished epoch that enter the frequency debt.
struct PrevEpoch {
  std::uint32_t M = 1;
  double D_a = 0.0;
  double W = 0.0;
};

/// One Robbins-Monro step at the ACK that opens a new epoch.
///
/// In order: advance k; fold D_v_prev into the running means mu and m;
/// update the debt U <- (U + M/f_max - (D_a + W + D_v))^+ and nu = U/V;
/// form B = g(gamma_old, nu, D_a_new, D_v_prev) + N_k; step gamma by eta_k B
/// (or by eta_k d with momentum) and project onto the bounds.
LearnerState begin_epoch_update(const LearnerState& state, double D_a_new, double D_v_prev,
                                const PrevEpoch& prev, FrequencyCap f_max);

} // namespace aoi
