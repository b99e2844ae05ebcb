#pragma once

#include <string>

#include "aoi/channel.hpp"
#include "aoi/frequency.hpp"

namespace aoi {

/// Waiting-time rule applied after each ACK. Retries (NACKs) never wait.
class Policy {
public:
  enum class Kind { threshold, constant_wait, zero_wait };

  /// Wait (theta - D_a)^+ after the first ACK of an epoch.
  static Policy threshold(double theta);
  static Policy constant_wait(double w);
  static Policy zero_wait() { return Policy(Kind::zero_wait, 0.0); }

  double waiting_time(double d_a, bool is_first_of_epoch) const;

  Kind kind() const { return kind_; }
  /// theta for threshold, w for constant_wait, 0 for zero_wait.
  double parameter() const { return value_; }
  std::string describe() const;

private:
  Policy(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

/// The constant-wait baseline: w = max{E[M]/f_max - E[DF] - E[DB] - E[Dv], 0}.
Policy constant_wait_from_moments(const ChannelMoments& moments, FrequencyCap f_max);

} // namespace aoi
