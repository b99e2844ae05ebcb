#include "aoi/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "aoi/errors.hpp"

namespace aoi {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("normal_quantile: p must lie in (0,1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

DelayDistribution DelayDistribution::deterministic(double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw InvalidParameter("deterministic delay must be finite and >= 0");
  return {DelayKind::deterministic, value, 0.0};
}

DelayDistribution DelayDistribution::uniform(double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi))
    throw InvalidParameter("uniform delay needs 0 <= a < b < inf");
  return {DelayKind::uniform, lo, hi};
}

DelayDistribution DelayDistribution::lognormal(double mu, double sigma) {
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma))
    throw InvalidParameter("lognormal delay needs finite mu and sigma > 0");
  return {DelayKind::lognormal, mu, sigma};
}

DelayDistribution DelayDistribution::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw InvalidParameter("exponential delay needs rate > 0");
  return {DelayKind::exponential, rate, 0.0};
}

DelayDistribution DelayDistribution::with_floor(double epsilon) const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw InvalidParameter("epsilon floor must be finite and >= 0");
  DelayDistribution d = *this;
  d.floor_ = epsilon;
  if (d.cap_) d = d.truncated(*d.cap_, d.mode_);
  return d;
}

DelayDistribution DelayDistribution::truncated(double upper, Truncation mode) const {
  if (!std::isfinite(upper) || !(upper > floor_))
    throw InvalidParameter("truncation upper bound must be finite and exceed the floor");
  DelayDistribution d = *this;
  d.cap_ = upper;
  d.mode_ = mode;
  d.cap_mass_ = base_cdf(upper - floor_);
  if (mode == Truncation::reject && !(d.cap_mass_ > 0.0))
    throw InvalidParameter("truncation upper bound leaves no probability mass");
  return d;
}

DelayDistribution DelayDistribution::truncated_at_quantile(double p, Truncation mode) const {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("truncation quantile must lie in (0,1)");
  if (kind_ == DelayKind::deterministic)
    throw InvalidParameter("quantile truncation of a point mass is meaningless");
  return truncated(quantile(p), mode);
}

double DelayDistribution::base_cdf(double y) const {
  switch (kind_) {
  case DelayKind::deterministic:
    return y >= p1_ ? 1.0 : 0.0;
  case DelayKind::uniform:
    return std::clamp((y - p1_) / (p2_ - p1_), 0.0, 1.0);
  case DelayKind::lognormal:
    return y <= 0.0 ? 0.0 : normal_cdf((std::log(y) - p1_) / p2_);
  case DelayKind::exponential:
    return y <= 0.0 ? 0.0 : -std::expm1(-p1_ * y);
  }
  return 0.0;
}

double DelayDistribution::base_quantile(double p) const {
  switch (kind_) {
  case DelayKind::deterministic:
    return p1_;
  case DelayKind::uniform:
    return p1_ + p * (p2_ - p1_);
  case DelayKind::lognormal:
    return std::exp(p1_ + p2_ * normal_quantile(p));
  case DelayKind::exponential:
    return -std::log1p(-p) / p1_;
  }
  return 0.0;
}

double DelayDistribution::base_moment(int n) const {
  switch (kind_) {
  case DelayKind::deterministic:
    return std::pow(p1_, n);
  case DelayKind::uniform:
    return (std::pow(p2_, n + 1) - std::pow(p1_, n + 1)) / ((n + 1) * (p2_ - p1_));
  case DelayKind::lognormal:
    return std::exp(n * p1_ + 0.5 * n * n * p2_ * p2_);
  case DelayKind::exponential:
    return n == 1 ? 1.0 / p1_ : 2.0 / (p1_ * p1_);
  }
  return 0.0;
}

double DelayDistribution::base_partial_moment(int n, double c) const {
  switch (kind_) {
  case DelayKind::deterministic:
    return p1_ <= c ? std::pow(p1_, n) : 0.0;
  case DelayKind::uniform: {
    if (c <= p1_) return 0.0;
    const double hi = std::min(c, p2_);
    return (std::pow(hi, n + 1) - std::pow(p1_, n + 1)) / ((n + 1) * (p2_ - p1_));
  }
  case DelayKind::lognormal: {
    if (c <= 0.0) return 0.0;
    const double s2 = p2_ * p2_;
    return std::exp(n * p1_ + 0.5 * n * n * s2) * normal_cdf((std::log(c) - p1_ - n * s2) / p2_);
  }
  case DelayKind::exponential: {
    if (c <= 0.0) return 0.0;
    const double r = p1_;
    const double tail = std::exp(-r * c);
    if (n == 1) return 1.0 / r - tail * (c + 1.0 / r);
    return 2.0 / (r * r) - tail * (c * c + 2.0 * c / r + 2.0 / (r * r));
  }
  }
  return 0.0;
}

double DelayDistribution::truncated_moment(int n) const {
  if (!cap_) return base_moment(n);
  const double c = *cap_ - floor_;
  const double pm = base_partial_moment(n, c);
  if (mode_ == Truncation::reject) return pm / cap_mass_;
  return pm + std::pow(c, n) * (1.0 - cap_mass_);
}

double DelayDistribution::sample(RngStream& rng) const {
  if (kind_ == DelayKind::deterministic) {
    double y = p1_;
    if (cap_) y = std::min(y, *cap_ - floor_);
    return floor_ + y;
  }
  double u = rng.next_uniform();
  if (cap_ && mode_ == Truncation::reject) u *= cap_mass_;
  double y = base_quantile(u);
  if (cap_) y = std::min(y, *cap_ - floor_);
  return floor_ + y;
}

double DelayDistribution::mean() const { return floor_ + truncated_moment(1); }

double DelayDistribution::second_moment() const {
  return floor_ * floor_ + 2.0 * floor_ * truncated_moment(1) + truncated_moment(2);
}

double DelayDistribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("quantile p must lie in (0,1)");
  return floor_ + base_quantile(p);
}

std::optional<double> DelayDistribution::support_upper() const {
  std::optional<double> hi;
  if (kind_ == DelayKind::deterministic) hi = floor_ + p1_;
  if (kind_ == DelayKind::uniform) hi = floor_ + p2_;
  if (cap_) hi = hi ? std::min(*hi, *cap_) : *cap_;
  return hi;
}

bool DelayDistribution::is_box() const {
  if (kind_ == DelayKind::deterministic) return true;
  if (kind_ != DelayKind::uniform) return false;
  return !cap_ || mode_ == Truncation::reject || *cap_ >= floor_ + p2_;
}

std::pair<double, double> DelayDistribution::box() const {
  if (!is_box()) throw InvalidParameter("box(): law is not deterministic or uniform");
  if (kind_ == DelayKind::deterministic) {
    const double v = floor_ + (cap_ ? std::min(p1_, *cap_ - floor_) : p1_);
    return {v, v};
  }
  return {floor_ + p1_, *support_upper()};
}

std::string DelayDistribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
  case DelayKind::deterministic: os << "deterministic(" << p1_ << ")"; break;
  case DelayKind::uniform: os << "uniform(" << p1_ << "," << p2_ << ")"; break;
  case DelayKind::lognormal: os << "lognormal(" << p1_ << "," << p2_ << ")"; break;
  case DelayKind::exponential: os << "exponential(" << p1_ << ")"; break;
  }
  if (floor_ > 0.0) os << "+" << floor_;
  if (cap_) os << (mode_ == Truncation::reject ? "|<=" : "|min ") << *cap_;
  return os.str();
}

void ChannelParams::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidParameter("loss probability alpha must lie in [0,1)");
  if (m_cap < 1) throw InvalidParameter("attempt cap m_cap must be >= 1");
}

std::string ChannelParams::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "alpha=" << alpha << ";fwd=" << fwd.describe() << ";bwd=" << bwd.describe() << ";m_cap=" << m_cap;
  return os.str();
}

double draw_delay(const DelayDistribution& dist, RngStream& rng) { return dist.sample(rng); }

EpochOutcome sample_epoch(const ChannelParams& params, RngStream& rng, std::uint64_t index) {
  EpochOutcome e;
  e.index = index;
  e.first_attempt.d_f = params.fwd.sample(rng);
  e.first_attempt.d_b = params.bwd.sample(rng);
  e.D_a = e.first_attempt.round_trip();
  while (e.M < params.m_cap && rng.next_uniform() < params.alpha) {
    Attempt a;
    a.d_f = params.fwd.sample(rng);
    a.d_b = params.bwd.sample(rng);
    e.failed_attempts.push_back(a);
    e.D_v += a.round_trip();
    ++e.M;
  }
  return e;
}

ChannelMoments analytic_moments(const ChannelParams& params) {
  params.validate();
  ChannelMoments m;
  m.mean_DF = params.fwd.mean();
  m.mean_DB = params.bwd.mean();
  m.mean_Da = m.mean_DF + m.mean_DB;
  m.m2_Da = params.fwd.second_moment() + 2.0 * m.mean_DF * m.mean_DB + params.bwd.second_moment();
  const double a = params.alpha;
  m.mean_M = 1.0 / (1.0 - a);
  const double retries = a / (1.0 - a);                          // E[N]
  const double retries_ff = 2.0 * a * a / ((1.0 - a) * (1.0 - a)); // E[N(N-1)]
  m.mean_Dv = retries * m.mean_Da;
  m.m2_Dv = retries * m.m2_Da + retries_ff * m.mean_Da * m.mean_Da;
  return m;
}

} // namespace aoi
