#include "bsde/error.hpp"

namespace bsde {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Domain: return "domain-error";
    case ErrorKind::InvalidCoefficient: return "invalid-coefficient";
    case ErrorKind::Configuration: return "configuration-error";
    case ErrorKind::UnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::SolverDiverged: return "solver-diverged";
    case ErrorKind::IterationLimit: return "iteration-limit";
    case ErrorKind::PreconditionViolation: return "precondition-violation";
    case ErrorKind::InvalidHypothesis: return "invalid-hypothesis";
    case ErrorKind::ConstructionBug: return "construction-bug";
    case ErrorKind::Internal: return "internal-error";
  }
  return "unknown";
}

}  // namespace bsde
