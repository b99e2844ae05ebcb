#pragma once

#include <limits>

#include "aoi/errors.hpp"

namespace aoi {

/// Sampling-frequency cap f_max, or no cap at all.
class FrequencyCap {
public:
  static FrequencyCap unlimited() { return FrequencyCap(); }
  static FrequencyCap of(double f_max) {
    if (!(f_max > 0.0)) throw InvalidParameter("f_max must be > 0");
    FrequencyCap c;
    if (f_max < std::numeric_limits<double>::infinity()) {
      c.bounded_ = true;
      c.value_ = f_max;
    }
    return c;
  }

  bool bounded() const { return bounded_; }
  /// f_max, or +inf when unlimited.
  double value() const { return bounded_ ? value_ : std::numeric_limits<double>::infinity(); }
  /// 1/f_max, or 0 when unlimited.
  double min_interval() const { return bounded_ ? 1.0 / value_ : 0.0; }

private:
  FrequencyCap() = default;
  bool bounded_ = false;
  double value_ = 0.0;
};

} // namespace aoi
