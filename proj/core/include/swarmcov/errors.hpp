#pragma once

#include <stdexcept>
#include <string>

namespace swarmcov {

/// Broad failure classes; the command-line tool maps these onto exit codes.
enum class ErrorKind {
  input,         // malformed or out-of-contract input data
  numerical,     // optimizer, fit or sampler could not produce a result
  insufficient,  // not enough data for the requested statistic
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

#define SWARMCOV_DEFINE_ERROR(Name, Kind)                                     \
  class Name : public Error {                                                 \
  public:                                                                     \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

SWARMCOV_DEFINE_ERROR(InvalidInput, input)
SWARMCOV_DEFINE_ERROR(InvalidDensity, input)
SWARMCOV_DEFINE_ERROR(EmptySwarm, input)
SWARMCOV_DEFINE_ERROR(MalformedTrajectory, input)
SWARMCOV_DEFINE_ERROR(UnsupportedGradient, input)
SWARMCOV_DEFINE_ERROR(SamplingFailure, numerical)
SWARMCOV_DEFINE_ERROR(OptimizationFailure, numerical)
SWARMCOV_DEFINE_ERROR(DegenerateBenchmark, numerical)
SWARMCOV_DEFINE_ERROR(DegenerateTest, numerical)
SWARMCOV_DEFINE_ERROR(InsufficientData, insufficient)

#undef SWARMCOV_DEFINE_ERROR

}  // namespace swarmcov
