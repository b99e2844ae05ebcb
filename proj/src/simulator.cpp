#include "aoi/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "aoi/errors.hpp"

namespace aoi {

std::string PolicySpec::name() const {
  switch (kind) {
  case PolicyKind::online: return "online";
  case PolicyKind::online_momentum: return "online_momentum";
  case PolicyKind::constant_wait: return "constant_wait";
  case PolicyKind::zero_wait: return "zero_wait";
  case PolicyKind::fixed_threshold: {
    std::ostringstream os;
    os.precision(17);
    os << "fixed_threshold(" << theta << ")";
    return os.str();
  }
  }
  return "unknown";
}

PolicySpec PolicySpec::parse(const std::string& text) {
  PolicySpec p;
  if (text == "online") return p;
  if (text == "online_momentum") {
    p.kind = PolicyKind::online_momentum;
    return p;
  }
  if (text == "constant_wait") {
    p.kind = PolicyKind::constant_wait;
    return p;
  }
  if (text == "zero_wait") {
    p.kind = PolicyKind::zero_wait;
    return p;
  }
  const std::string prefix = "fixed_threshold(";
  if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size() + 1 && text.back() == ')') {
    const std::string num = text.substr(prefix.size(), text.size() - prefix.size() - 1);
    char* end = nullptr;
    const double theta = std::strtod(num.c_str(), &end);
    if (end != num.c_str() + num.size() || !(theta >= 0.0) || !std::isfinite(theta))
      throw InvalidParameter("bad threshold in policy '" + text + "'");
    p.kind = PolicyKind::fixed_threshold;
    p.theta = theta;
    return p;
  }
  throw InvalidParameter("unknown policy '" + text + "'");
}

void RunConfig::validate() const {
  channel.validate();
  if (horizon_epochs < 1) throw InvalidParameter("horizon_epochs must be >= 1");
  if (trace_stride < 1) throw InvalidParameter("trace_stride must be >= 1");
  if (!(V > 0.0)) throw InvalidParameter("V must be > 0");
  if (policy.kind == PolicyKind::online_momentum && !(momentum_a > 0.0 && momentum_a <= 1.0))
    throw InvalidParameter("momentum factor a must lie in (0,1]");
  if (policy.kind == PolicyKind::fixed_threshold && !(policy.theta >= 0.0))
    throw InvalidParameter("fixed threshold must be >= 0");
  if (priors.mode == PriorMode::none && (priors.warmup_epochs < 1 || !(priors.cap_factor > 0.0)))
    throw InvalidParameter("prior-free learner needs warmup_epochs >= 1 and cap_factor > 0");
}

double epoch_aoi(double d_f_first, double L_prev, double L_curr) {
  return d_f_first * L_prev + 0.5 * L_curr * L_curr;
}

namespace {

Policy baseline_policy(const RunConfig& cfg) {
  switch (cfg.policy.kind) {
  case PolicyKind::constant_wait: return constant_wait_from_moments(analytic_moments(cfg.channel), cfg.f_max);
  case PolicyKind::zero_wait: return Policy::zero_wait();
  case PolicyKind::fixed_threshold: return Policy::threshold(cfg.policy.theta);
  default: return Policy::zero_wait(); // learners start at zero wait until a state exists
  }
}

LearnerSettings learner_settings(const RunConfig& cfg) {
  LearnerSettings s;
  s.V = cfg.V;
  s.momentum = cfg.policy.kind == PolicyKind::online_momentum;
  s.momentum_a = cfg.momentum_a;
  s.gamma0 = cfg.gamma0;
  return s;
}

} // namespace

RunResult run(const RunConfig& cfg) {
  cfg.validate();
  RunResult out;
  RunSummary& sum = out.summary;

  std::vector<std::uint64_t> checkpoints = cfg.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  auto next_cp = checkpoints.begin();

  // Warm-up: sample at t = 0 and retry until the first success, whose
  // sampling instant S_1 = L_0 opens epoch 1. A(t) = t before the first delivery.
  RngStream warm_rng(cfg.seed, 0);
  const EpochOutcome warm = sample_epoch(cfg.channel, warm_rng, 0);
  const double L0 = warm.D_v;
  double cum = 0.5 * L0 * L0;
  double S = L0;
  std::uint64_t samples = warm.M - 1;
  if (cfg.keep_epochs) out.epochs.push_back(warm);

  const Policy fixed = baseline_policy(cfg);
  std::optional<LearnerState> learner;
  const LearnerSettings settings = learner_settings(cfg);
  if (cfg.policy.learns() && cfg.priors.mode != PriorMode::none) {
    const MomentPriors priors =
        cfg.priors.mode == PriorMode::exact ? priors_from_channel(cfg.channel) : cfg.priors.priors;
    learner = initial_learner_state(gamma_bounds_from_priors(priors, cfg.f_max), settings);
    sum.bounds = learner->bounds;
  }
  double warm_len_sum = 0.0; // zero wait, so epoch length = D_a + D_v

  EpochOutcome prev;
  double L_prev = L0;
  for (std::uint64_t k = 1; k <= cfg.horizon_epochs; ++k) {
    RngStream rng(cfg.seed, k);
    EpochOutcome e = sample_epoch(cfg.channel, rng, k);

    double wait = 0.0;
    EpochRecord rec;
    if (cfg.policy.learns()) {
      if (!learner && k > cfg.priors.warmup_epochs) {
        const double n = static_cast<double>(cfg.priors.warmup_epochs);
        GammaBounds b;
        b.gamma_lb = 0.0;
        b.gamma_ub = cfg.priors.cap_factor * warm_len_sum / n;
        b.D_bar_lb = warm_len_sum / n;
        if (!(b.D_bar_lb > 0.0)) throw InvalidParameter("warm-up observed no delay; cannot set step sizes");
        learner = initial_learner_state(b, settings);
        sum.bounds = b;
      }
      if (learner && k >= 2)
        learner = begin_epoch_update(*learner, e.D_a, prev.D_v, PrevEpoch{prev.M, prev.D_a, prev.W}, cfg.f_max);
      if (learner) {
        wait = Policy::threshold(learner->threshold()).waiting_time(e.D_a, true);
        rec.gamma = learner->gamma;
        rec.nu = learner->nu;
        rec.U = learner->U;
      } else {
        wait = 0.0;
        rec.gamma = 0.0;
        warm_len_sum += e.D_a + e.D_v;
      }
    } else {
      wait = fixed.waiting_time(e.D_a, true);
      if (cfg.policy.kind == PolicyKind::fixed_threshold) rec.gamma = cfg.policy.theta;
    }
    e.set_wait(wait);

    const double F = epoch_aoi(e.first_attempt.d_f, L_prev, e.L);
    cum += F;
    S += e.L;
    samples += e.M;
    if (k == 1) {
      sum.warmup_area = cum;
      sum.warmup_time = S;
      sum.warmup_samples = samples;
    }

    const bool at_cp = next_cp != checkpoints.end() && *next_cp == k;
    while (next_cp != checkpoints.end() && *next_cp <= k) ++next_cp;
    if (k % cfg.trace_stride == 0 || k == cfg.horizon_epochs || at_cp) {
      rec.k = k;
      rec.M = e.M;
      rec.D_a = e.D_a;
      rec.D_v = e.D_v;
      rec.W = e.W;
      rec.L = e.L;
      rec.F = F;
      rec.S_next = S;
      rec.cum_aoi = cum;
      rec.samples = samples;
      const double area = cfg.exclude_warmup ? cum - sum.warmup_area : cum;
      const double span = cfg.exclude_warmup ? S - sum.warmup_time : S;
      const double count = static_cast<double>(cfg.exclude_warmup ? samples - sum.warmup_samples : samples);
      rec.time_avg_aoi = span > 0.0 ? area / span : std::numeric_limits<double>::quiet_NaN();
      rec.mean_interval = count > 0.0 ? span / count : std::numeric_limits<double>::quiet_NaN();
      if (cfg.aoi_reference) rec.regret = area - *cfg.aoi_reference * span;
      out.records.push_back(rec);
    }

    if (cfg.keep_epochs) out.epochs.push_back(e);
    L_prev = e.L;
    prev = std::move(e);
  }

  sum.epochs = cfg.horizon_epochs;
  sum.elapsed = S;
  sum.cum_aoi = cum;
  sum.total_samples = samples;
  const EpochRecord& last = out.records.back();
  sum.time_avg_aoi = last.time_avg_aoi;
  sum.mean_sampling_interval = last.mean_interval;
  sum.regret = last.regret;
  if (learner) {
    sum.final_gamma = learner->gamma;
    sum.final_nu = learner->nu;
  } else if (cfg.policy.kind == PolicyKind::fixed_threshold) {
    sum.final_gamma = cfg.policy.theta;
  }
  return out;
}

std::vector<double> regret(const RunResult& result, const OracleSolution& oracle, bool exclude_warmup) {
  std::vector<double> r;
  r.reserve(result.records.size());
  for (const auto& rec : result.records) {
    double area = rec.cum_aoi, span = rec.S_next;
    if (exclude_warmup) {
      area -= result.summary.warmup_area;
      span -= result.summary.warmup_time;
    }
    r.push_back(area - oracle.aoi_opt * span);
  }
  return r;
}

} // namespace aoi
