#pragma once

#include <stdexcept>
#include <string>

namespace dampwave {

enum class ErrorKind {
  InvalidArgument,
  InvalidExtent,
  UnsupportedBcDimension,
  MeshMismatch,
  NegativeTime,
  EmptyEpsilons,
  UnknownName,
  NewtonNoConvergence,
  NewtonStall,
  SingularJacobian,
  DegenerateSamples,
  NonSpd,
  NotCoercive,
  NegativeSample,
  NonPositiveSample,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; the kind decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Numeric failures (solver breakdowns) as opposed to bad input.
  bool is_numeric() const noexcept {
    return kind_ == ErrorKind::NewtonNoConvergence || kind_ == ErrorKind::NewtonStall ||
           kind_ == ErrorKind::SingularJacobian || kind_ == ErrorKind::DegenerateSamples;
  }

 private:
  ErrorKind kind_;
};

}  // namespace dampwave
