#pragma once

#include <stdexcept>
#include <string>

namespace tamebc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define TAMEBC_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                      \
   public:                                                         \
    using Error::Error;                                            \
    const char* kind() const noexcept override { return #Name; }   \
  }

TAMEBC_DEFINE_ERROR(UnsupportedExtension);
TAMEBC_DEFINE_ERROR(ZeroResidue);
TAMEBC_DEFINE_ERROR(PrecisionExhausted);
TAMEBC_DEFINE_ERROR(NotTopologicallyUnipotent);
TAMEBC_DEFINE_ERROR(IrregularInput);
TAMEBC_DEFINE_ERROR(NotInDomain);
TAMEBC_DEFINE_ERROR(RootOfUnityUnavailable);
TAMEBC_DEFINE_ERROR(NonConvergence);
TAMEBC_DEFINE_ERROR(NotANorm);
TAMEBC_DEFINE_ERROR(DepthExceeded);
TAMEBC_DEFINE_ERROR(UncertifiedComparison);
TAMEBC_DEFINE_ERROR(ConfigInvalid);
TAMEBC_DEFINE_ERROR(ParseError);

#undef TAMEBC_DEFINE_ERROR

}  // namespace tamebc
