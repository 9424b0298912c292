#pragma once

#include <stdexcept>
#include <string>

namespace weilbc {

enum class ErrorCode {
  EvenCharacteristic,
  NotPrime,
  LevelMismatch,
  ZeroArgument,
  DivisionByZero,
  DimensionMismatch,
  GroupTooLarge,
  NotSymplectic,
  Singular,
  FactorizationFailed,
  AmbientCapExceeded,
  SupportMismatch,
  ConfigInvalid,
  ArithmeticOverflow,
  ParseError,
  Internal,
};

const char* to_string(ErrorCode code);

/// Base of every exception thrown by the library. Carries a machine-readable code
/// so reports can surface the failure class without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define WEILBC_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(ErrorCode::Name, what) {} \
  };

WEILBC_DEFINE_ERROR(EvenCharacteristic)
WEILBC_DEFINE_ERROR(NotPrime)
WEILBC_DEFINE_ERROR(LevelMismatch)
WEILBC_DEFINE_ERROR(ZeroArgument)
WEILBC_DEFINE_ERROR(DivisionByZero)
WEILBC_DEFINE_ERROR(DimensionMismatch)
WEILBC_DEFINE_ERROR(GroupTooLarge)
WEILBC_DEFINE_ERROR(NotSymplectic)
WEILBC_DEFINE_ERROR(Singular)
WEILBC_DEFINE_ERROR(FactorizationFailed)
WEILBC_DEFINE_ERROR(AmbientCapExceeded)
WEILBC_DEFINE_ERROR(SupportMismatch)
WEILBC_DEFINE_ERROR(ConfigInvalid)
WEILBC_DEFINE_ERROR(ArithmeticOverflow)
WEILBC_DEFINE_ERROR(ParseError)

#undef WEILBC_DEFINE_ERROR

/// Raised when an internal invariant fails (a certificate does not verify).
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(ErrorCode::Internal, what) {}
};

}  // namespace weilbc
