#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "gds/core/types.hpp"

namespace gds {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (wrong dimension, non-finite input, bad counts).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dataset does not have the shape the model was asked for.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Base of everything that can go wrong while sampling.
class SamplerError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

class ConvergenceError : public SamplerError {
 public:
  ConvergenceError(const std::string& what, ParameterVector best_point, double best_log_density,
                   int iterations)
      : SamplerError(what),
        best_point(std::move(best_point)),
        best_log_density(best_log_density),
        iterations(iterations) {}

  ParameterVector best_point;
  double best_log_density;
  int iterations;
};

class NotNegativeDefinite : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

/// Φ > 1 observed for a proposal draw: the scale factor has to be re-tuned.
class DominanceViolation : public SamplerError {
 public:
  DominanceViolation(const std::string& what, double log_phi)
      : SamplerError(what), log_phi(log_phi) {}
  double log_phi;
  double scale = std::numeric_limits<double>::quiet_NaN();  // covariance scale in force, when known
};

class TuningFailed : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

class AttemptCapExceeded : public SamplerError {
 public:
  AttemptCapExceeded(const std::string& what, double threshold_v, std::uint64_t attempts)
      : SamplerError(what), threshold_v(threshold_v), attempts(attempts) {}
  double threshold_v;
  std::uint64_t attempts;
};

}  // namespace gds
