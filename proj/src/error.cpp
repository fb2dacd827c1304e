#include "ebl/error.hpp"

namespace ebl {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::no_experience: return "no_experience";
    case ErrorCode::degenerate_belief: return "degenerate_belief";
    case ErrorCode::degenerate_equilibrium: return "degenerate_equilibrium";
    case ErrorCode::invalid_equilibrium: return "invalid_equilibrium";
    case ErrorCode::no_root: return "no_root";
    case ErrorCode::data: return "data";
    case ErrorCode::unknown_column: return "unknown_column";
    case ErrorCode::bad_number: return "bad_number";
    case ErrorCode::duplicate_key: return "duplicate_key";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::missing_value: return "missing_value";
    case ErrorCode::singular_design: return "singular_design";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace ebl
