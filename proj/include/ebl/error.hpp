#pragma once

#include <stdexcept>
#include <string>

namespace ebl {

// Numeric values are part of the C API (see ebl_c.h) and must stay stable.
enum class ErrorCode : int {
  parameter = 1,
  no_experience = 2,
  degenerate_belief = 3,
  degenerate_equilibrium = 4,
  invalid_equilibrium = 5,
  no_root = 6,
  data = 7,
  unknown_column = 8,
  bad_number = 9,
  duplicate_key = 10,
  empty_input = 11,
  missing_value = 12,
  singular_design = 13,
  io = 14,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::parameter, what);
}

}  // namespace ebl
