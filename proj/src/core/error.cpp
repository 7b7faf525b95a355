// SPDX-License-Identifier: Apache-2.0
#include "error.hpp"

namespace ltopt {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::mismatched_grid: return "mismatched-grid";
    case ErrorCode::forbidden_combination: return "forbidden-combination";
    case ErrorCode::singular_integral: return "singular-integral";
    case ErrorCode::domain_error: return "domain-error";
    case ErrorCode::no_convergence: return "no-convergence";
    case ErrorCode::singular_matrix: return "matrix-singular";
    case ErrorCode::zero_potential: return "zero-potential";
    case ErrorCode::degenerate_density: return "degenerate-density";
    case ErrorCode::lost_spectrum: return "lost-spectrum";
    case ErrorCode::branch_terminated: return "branch-terminated";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::insufficient_channels: return "insufficient-channels";
    case ErrorCode::refinement_failure: return "refinement-failure";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace ltopt
