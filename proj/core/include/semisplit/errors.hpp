#pragma once

#include <stdexcept>
#include <string>

namespace semisplit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SEMISPLIT_ERROR_TYPE(Name) \
  struct Name : Error {            \
    using Error::Error;            \
  }

SEMISPLIT_ERROR_TYPE(NotPsdError);
SEMISPLIT_ERROR_TYPE(NoConvergenceError);
SEMISPLIT_ERROR_TYPE(SingularMatrixError);
SEMISPLIT_ERROR_TYPE(NotSummableError);
SEMISPLIT_ERROR_TYPE(HypothesisViolatedError);
SEMISPLIT_ERROR_TYPE(RuleInapplicableError);
SEMISPLIT_ERROR_TYPE(DegenerateClassError);
SEMISPLIT_ERROR_TYPE(GammaOutOfRangeError);
SEMISPLIT_ERROR_TYPE(InvalidShiftConstantError);
SEMISPLIT_ERROR_TYPE(BranchPreconditionError);
SEMISPLIT_ERROR_TYPE(InteractionDominanceError);
SEMISPLIT_ERROR_TYPE(OutOfDomainError);
SEMISPLIT_ERROR_TYPE(EmptyResolventError);
SEMISPLIT_ERROR_TYPE(RootSolveError);
SEMISPLIT_ERROR_TYPE(ZeroDetectedError);
SEMISPLIT_ERROR_TYPE(KappaViolatedError);
SEMISPLIT_ERROR_TYPE(InsufficientDataError);
SEMISPLIT_ERROR_TYPE(CertificateInfeasibleError);
SEMISPLIT_ERROR_TYPE(AssumptionViolatedError);
SEMISPLIT_ERROR_TYPE(ConfigError);

#undef SEMISPLIT_ERROR_TYPE

}  // namespace semisplit
