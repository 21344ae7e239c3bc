#pragma once

#include <stdexcept>
#include <string>

namespace plab {

// Every error raised by the library derives from Error so callers can catch
// the family at once; the concrete type names the contract that was broken.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PLAB_DEFINE_ERROR(Name)              \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

PLAB_DEFINE_ERROR(ZeroVector);
PLAB_DEFINE_ERROR(NumericalFailure);
PLAB_DEFINE_ERROR(DegenerateLift);
PLAB_DEFINE_ERROR(StageOutOfRange);
PLAB_DEFINE_ERROR(InvalidSpec);
PLAB_DEFINE_ERROR(CapExceeded);
PLAB_DEFINE_ERROR(InvalidCloud);
PLAB_DEFINE_ERROR(BasePointSelectionFailed);
PLAB_DEFINE_ERROR(ContinuationFailure);
PLAB_DEFINE_ERROR(InvalidConfig);
PLAB_DEFINE_ERROR(ParseError);
PLAB_DEFINE_ERROR(ValidationError);
PLAB_DEFINE_ERROR(MissingArtifacts);
PLAB_DEFINE_ERROR(IoError);

#undef PLAB_DEFINE_ERROR

}  // namespace plab
