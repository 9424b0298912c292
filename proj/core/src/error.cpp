#include "weilbc/error.hpp"

namespace weilbc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EvenCharacteristic: return "EvenCharacteristic";
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::ZeroArgument: return "ZeroArgument";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GroupTooLarge: return "GroupTooLarge";
    case ErrorCode::NotSymplectic: return "NotSymplectic";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::FactorizationFailed: return "FactorizationFailed";
    case ErrorCode::AmbientCapExceeded: return "AmbientCapExceeded";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ArithmeticOverflow: return "ArithmeticOverflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace weilbc
