#pragma once

#include <stdexcept>
#include <string>

namespace mdm {

// Every failure raised by the library derives from Error so callers (the CLI in
// particular) can separate domain failures from programming errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MDM_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

MDM_DEFINE_ERROR(CurvatureViolation);
MDM_DEFINE_ERROR(EmptyNetwork);
MDM_DEFINE_ERROR(InvalidNetwork);
MDM_DEFINE_ERROR(CoverageViolation);
MDM_DEFINE_ERROR(NotParallel);
MDM_DEFINE_ERROR(DegenerateLine);
MDM_DEFINE_ERROR(TooManyTerminals);
MDM_DEFINE_ERROR(RadiusTooLarge);
MDM_DEFINE_ERROR(InvalidRatio);
MDM_DEFINE_ERROR(SingularConfig);
MDM_DEFINE_ERROR(CaseDetectionFailure);
MDM_DEFINE_ERROR(Diverged);
MDM_DEFINE_ERROR(InfeasibleStart);
MDM_DEFINE_ERROR(ParseError);

#undef MDM_DEFINE_ERROR

}  // namespace mdm
