#ifndef COOPSCHED_ERRORS_HPP
#define COOPSCHED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coopsched {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration rejected by validation; what() lists every violated invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// State enumeration exceeded the configured cap.
class StateSpaceError : public Error {
 public:
  using Error::Error;
};

/// A linear solve failed or did not reach the required residual.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what), residual(residual) {}
  double residual = 0.0;
};

/// More than the tolerated probability mass fell beyond the grid horizon.
class HorizonError : public Error {
 public:
  using Error::Error;
};

/// Higher-priority load saturates the server pool; the busy period is defective.
class UnstableBusyPeriodError : public Error {
 public:
  using Error::Error;
};

}  // namespace coopsched

#endif  // COOPSCHED_ERRORS_HPP
