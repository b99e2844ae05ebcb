#include "aoi/learner.hpp"

#include <algorithm>
#include <cmath>

#include "aoi/errors.hpp"

namespace aoi {

MomentPriors priors_from_channel(const ChannelParams& params) {
  const ChannelMoments mo = analytic_moments(params);
  MomentPriors p;
  p.DF_mean_lb = p.DF_mean_ub = mo.mean_DF;
  p.DB_mean_lb = p.DB_mean_ub = mo.mean_DB;
  p.Dv_mean_lb = p.Dv_mean_ub = mo.mean_Dv;
  p.H_ub = mo.m2_Da + 2.0 * mo.mean_Da * mo.mean_Dv + mo.m2_Dv;
  p.DF_max = params.fwd.support_upper();
  p.DB_max = params.bwd.support_upper();
  p.M_max = params.m_cap;
  return p;
}

double GammaBounds::project(double gamma) const { return std::min(gamma_ub, std::max(gamma, gamma_lb)); }

GammaBounds gamma_bounds_from_priors(const MomentPriors& p, FrequencyCap f_max) {
  if (p.DF_mean_lb > p.DF_mean_ub || p.DB_mean_lb > p.DB_mean_ub || p.Dv_mean_lb > p.Dv_mean_ub)
    throw InvalidParameter("moment priors: a lower bound exceeds its upper bound");
  GammaBounds b;
  const double d_lb = p.DF_mean_lb + p.DB_mean_lb + p.Dv_mean_lb;
  const double d_ub = p.DF_mean_ub + p.DB_mean_ub + p.Dv_mean_ub;
  if (!(d_lb > 0.0)) throw InvalidParameter("moment priors: mean delay lower bound must be > 0");
  b.D_bar_lb = d_lb;
  b.gamma_lb = std::max(0.5 * (p.DF_mean_lb + p.DB_mean_lb - p.Dv_mean_ub), 0.0);
  const double inv_f = f_max.min_interval();
  b.gamma_ub = (0.5 * p.H_ub + d_ub * inv_f + inv_f * inv_f) / (d_lb + inv_f) - p.Dv_mean_lb;
  if (b.gamma_ub < b.gamma_lb) {
    // Exact priors make the two sides equal in theory; allow round-off.
    if (b.gamma_lb - b.gamma_ub <= 1e-12 * std::max(1.0, b.gamma_lb))
      b.gamma_ub = b.gamma_lb;
    else
      throw InconsistentBounds("gamma_ub < gamma_lb: moment priors are inconsistent");
  }
  if (p.DF_max && p.DB_max && p.M_max)
    b.L_ub = b.gamma_ub + static_cast<double>(*p.M_max) * (*p.DF_max + *p.DB_max);
  return b;
}

double eval_g(double gamma, double nu, double d_a, double d_v) {
  const double top = std::max(d_a, gamma + nu);
  return 0.5 * top * top - gamma * (top + d_v);
}

double step_size(std::uint64_t k, double D_bar_lb) {
  if (k <= 1) return 1.0 / (2.0 * D_bar_lb);
  return 1.0 / ((static_cast<double>(k) + 2.0) * D_bar_lb);
}

double momentum_step(double d_prev, double a, double drive) { return (1.0 - a) * d_prev + a * drive; }

LearnerState initial_learner_state(const GammaBounds& bounds, const LearnerSettings& settings) {
  if (!(settings.V > 0.0)) throw InvalidParameter("V must be > 0");
  if (settings.momentum && !(settings.momentum_a > 0.0 && settings.momentum_a <= 1.0))
    throw InvalidParameter("momentum factor a must lie in (0,1]");
  LearnerState s;
  s.bounds = bounds;
  s.V = settings.V;
  s.momentum_enabled = settings.momentum;
  s.momentum_a = settings.momentum_a;
  s.gamma = bounds.project(settings.gamma0);
  return s;
}

LearnerState begin_epoch_update(const LearnerState& state, double D_a_new, double D_v_prev,
                                const PrevEpoch& prev, FrequencyCap f_max) {
  LearnerState s = state;
  s.k += 1;
  const double w = 1.0 / static_cast<double>(s.k);
  s.mu += w * (D_v_prev - s.mu);
  s.m += w * (D_v_prev * D_v_prev - s.m);

  if (f_max.bounded()) {
    const double length = prev.D_a + prev.W + D_v_prev;
    s.U = std::max(s.U + static_cast<double>(prev.M) * f_max.min_interval() - length, 0.0);
  } else {
    s.U = 0.0;
  }
  s.nu = s.U / s.V;

  const double drive = eval_g(state.gamma, s.nu, D_a_new, D_v_prev) + s.n_estimate();
  s.last_drive = drive;
  const double eta = step_size(s.k, s.bounds.D_bar_lb);
  if (s.momentum_enabled) {
    s.momentum_d = momentum_step(s.momentum_d, s.momentum_a, drive);
    s.gamma = s.bounds.project(state.gamma + eta * s.momentum_d);
  } else {
    s.gamma = s.bounds.project(state.gamma + eta * drive);
  }
  return s;
}

} // namespace aoi
