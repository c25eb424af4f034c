#ifndef SPECSHIFT_ERRORS_HPP
#define SPECSHIFT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace specshift {

/// Problems with input data or files (bad indices, malformed lines,
/// missing files). The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric failures: eigensolver non-convergence, overflow in tensor
/// ops, diverged training. The CLI maps these to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specshift

#endif
