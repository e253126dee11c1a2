#pragma once

#include <stdexcept>
#include <string>

namespace bsde {

enum class ErrorKind {
  InvalidArgument,
  Domain,
  InvalidCoefficient,
  Configuration,
  UnsupportedDimension,
  SolverDiverged,
  IterationLimit,
  PreconditionViolation,
  InvalidHypothesis,
  ConstructionBug,
  Internal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace bsde
