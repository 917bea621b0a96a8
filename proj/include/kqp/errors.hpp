#ifndef KQP_ERRORS_HPP
#define KQP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kqp {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input function has a nonzero average where a zero one is required.
struct MeanNotZero : Error {
  explicit MeanNotZero(const std::string& msg) : Error(msg) {}
};

// |omega . ell| fell below the divisor floor; message names the index.
struct SmallDivisorUnderflow : Error {
  explicit SmallDivisorUnderflow(const std::string& msg) : Error(msg) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

struct NonPositiveArgument : Error {
  explicit NonPositiveArgument(const std::string& msg) : Error(msg) {}
};

struct NoConvergence : Error {
  explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

struct Singular : Error {
  explicit Singular(const std::string& msg) : Error(msg) {}
};

struct IndexError : Error {
  explicit IndexError(const std::string& msg) : Error(msg) {}
};

// Truncated linear solve failed during a Newton step; carries diagnostics.
struct StepFailed : Error {
  StepFailed(const std::string& msg, int step, double condition)
      : Error(msg), step(step), condition(condition) {}
  int step;
  double condition;
};

// The parameter lambda is numerically resonant; no regularization is attempted.
struct BadParameter : Error {
  BadParameter(const std::string& msg, double lambda) : Error(msg), lambda(lambda) {}
  double lambda;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace kqp

#endif
