#pragma once

#include <stdexcept>
#include <string>

namespace dolfe {

// Invalid model inputs: non-monotone thresholds, bad probabilities, n = 0, ...
class InvalidParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Ingestion and serialization failures (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Base class for estimation failures (CLI exit code 3).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The dataset carries no likelihood information (no switching stayers).
class NoInformationError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// Hessian remained singular after one ridge attempt; message names the slots.
class SingularHessianError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// Parameter norm exceeded the divergence threshold (separation suspicion).
class SeparationError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// More than 20% of bootstrap replicates failed to converge.
class UnreliableBootstrapError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// The population design moment matrix is rank deficient.
class Assumption2ViolationError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// A conditioning event has zero probability.
class EmptyCellError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

}  // namespace dolfe
