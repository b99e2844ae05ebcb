#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

/// Base class for every error this library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A distribution, channel, or run configuration failed validation.
class InvalidParameter : public Error {
public:
  using Error::Error;
};

/// Moment priors produced gamma_ub < gamma_lb.
class InconsistentBounds : public Error {
public:
  using Error::Error;
};

/// Root bracketing failed: the target function never changed sign.
class NoSignChange : public Error {
public:
  using Error::Error;
};

/// Least-squares fit with a constant regressor or too few points.
class DegenerateFit : public Error {
public:
  using Error::Error;
};

/// Two ensemble tables do not cover the same (seed, checkpoint) pairs.
class UnpairedSeeds : public Error {
public:
  using Error::Error;
};

/// Runs from different channel configurations were mixed in one aggregate.
class MixedChannels : public Error {
public:
  using Error::Error;
};

} // namespace aoi
