#include "aoi/policy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aoi/errors.hpp"

namespace aoi {

Policy Policy::threshold(double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw InvalidParameter("threshold theta must be finite and >= 0");
  return Policy(Kind::threshold, theta);
}

Policy Policy::constant_wait(double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidParameter("constant wait must be finite and >= 0");
  return Policy(Kind::constant_wait, w);
}

double Policy::waiting_time(double d_a, bool is_first_of_epoch) const {
  if (!is_first_of_epoch) return 0.0;
  switch (kind_) {
  case Kind::threshold: return std::max(value_ - d_a, 0.0);
  case Kind::constant_wait: return value_;
  case Kind::zero_wait: return 0.0;
  }
  return 0.0;
}

std::string Policy::describe() const {
  std::ostringstream os;
  switch (kind_) {
  case Kind::threshold: os << "threshold(" << value_ << ")"; break;
  case Kind::constant_wait: os << "constant_wait(" << value_ << ")"; break;
  case Kind::zero_wait: os << "zero_wait"; break;
  }
  return os.str();
}

Policy constant_wait_from_moments(const ChannelMoments& m, FrequencyCap f_max) {
  if (!f_max.bounded()) return Policy::constant_wait(0.0);
  const double w = m.mean_M * f_max.min_interval() - m.mean_DF - m.mean_DB - m.mean_Dv;
  return Policy::constant_wait(std::max(w, 0.0));
}

} // namespace aoi
