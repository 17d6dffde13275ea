#pragma once

#include <stdexcept>
#include <string>

namespace freeconv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValidationCode { NonProbability, NegativeDensity, DuplicateAtom, InvalidAtom, InvalidAC };

class ValidationError : public Error {
 public:
  ValidationError(ValidationCode code, const std::string& what) : Error(what), code_(code) {}
  ValidationCode code() const noexcept { return code_; }

 private:
  ValidationCode code_;
};

class EvaluationOutsideDisk : public Error {
 public:
  using Error::Error;
};

/// A radial limit that did not settle over the schedule.
class NonConvergent : public Error {
 public:
  using Error::Error;
};

/// Raised by operations whose theory excludes unit point masses.
class PointMassInput : public Error {
 public:
  using Error::Error;
};

/// Arc positivity needs a factor with more than two support points.
class HypothesisNotMet : public Error {
 public:
  using Error::Error;
};

class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

/// The series oracle needs nonzero first moments in both factors.
class ZeroFirstMoment : public Error {
 public:
  using Error::Error;
};

/// Too many grid points failed to solve.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed measure spec (shorthand or JSON).
class SpecParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace freeconv
