#ifndef RSHD_ERRORS_HPP
#define RSHD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rshd {

enum class ErrorCode {
  invalid_argument,
  capacity,        // exact enumeration requested beyond the supported size
  unsupported,     // no guarantee exists for the requested combination
  infeasible_level,// bound vacuous at this (n, delta)
  data_format,
  io,
  runtime
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

// Probability strictly inside (0,1); every level (alpha, delta, beta, eta)
// in the API is one of these.
class Probability {
public:
  explicit Probability(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0))
      throw_error(ErrorCode::invalid_argument,
                  "probability must lie strictly in (0,1), got " +
                      std::to_string(value));
  }
  double value() const { return value_; }
  operator double() const { return value_; }

private:
  double value_;
};

} // namespace rshd

#endif
