// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace calib {

/// Malformed input file. Messages carry the 1-based line number where known.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Normal equations too ill-conditioned for an undamped solve.
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite values or a covariance that cannot be factorized.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace calib
