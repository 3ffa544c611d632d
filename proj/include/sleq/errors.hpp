#pragma once

#include <stdexcept>
#include <string>

namespace sleq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

// Precondition failures that the CLI maps to exit code 2.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class InfeasibleConstraint : public PreconditionViolation {
 public:
  using PreconditionViolation::PreconditionViolation;
};

class SlaterViolation : public PreconditionViolation {
 public:
  using PreconditionViolation::PreconditionViolation;
};

class E1Violated : public PreconditionViolation {
 public:
  using PreconditionViolation::PreconditionViolation;
};

class HypothesisViolation : public PreconditionViolation {
 public:
  using PreconditionViolation::PreconditionViolation;
};

class StrictFeasibilityViolation : public PreconditionViolation {
 public:
  using PreconditionViolation::PreconditionViolation;
};

class InfeasibleProblem : public PreconditionViolation {
 public:
  using PreconditionViolation::PreconditionViolation;
};

class HardCaseRecoveryFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace sleq
