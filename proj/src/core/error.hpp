// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ltopt {

enum class ErrorCode {
  invalid_parameter = 1,
  mismatched_grid,
  forbidden_combination,
  singular_integral,
  domain_error,
  no_convergence,
  singular_matrix,
  zero_potential,
  degenerate_density,
  lost_spectrum,
  branch_terminated,
  insufficient_data,
  insufficient_channels,
  refinement_failure,
  io_error,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace ltopt
