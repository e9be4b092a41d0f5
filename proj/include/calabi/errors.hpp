#pragma once

#include <stdexcept>

namespace calabi {

// Base class for every error condition raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define CALABI_ERROR_TYPE(Name) \
  struct Name : Error {         \
    using Error::Error;         \
  }

// Level-set tracing.
CALABI_ERROR_TYPE(SeedOffLevelSet);
CALABI_ERROR_TYPE(SingularPoint);
CALABI_ERROR_TYPE(DegenerateBranch);
CALABI_ERROR_TYPE(OutOfDomain);
CALABI_ERROR_TYPE(TraceFailure);

// Construction data.
CALABI_ERROR_TYPE(DegenerateAngle);
CALABI_ERROR_TYPE(NotKahler);
CALABI_ERROR_TYPE(NonRealRoot);
CALABI_ERROR_TYPE(DegenerateP);
CALABI_ERROR_TYPE(NoRoot);

// Stability.
CALABI_ERROR_TYPE(ArityMismatch);
CALABI_ERROR_TYPE(WallDivision);
CALABI_ERROR_TYPE(OutOfRegime);

// Flow.
CALABI_ERROR_TYPE(BadInterval);
CALABI_ERROR_TYPE(StepUnstable);
CALABI_ERROR_TYPE(SelfIntersection);
CALABI_ERROR_TYPE(MultipleCriticalPoints);
CALABI_ERROR_TYPE(BlowUp);

// Bundles.
CALABI_ERROR_TYPE(BranchEscapesWindow);

#undef CALABI_ERROR_TYPE

}  // namespace calabi
