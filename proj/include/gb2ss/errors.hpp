#ifndef GB2SS_ERRORS_HPP_
#define GB2SS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace gb2ss {

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// First moment of a GB2 does not exist (a*q <= 1).
class MomentError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed grouped observation, dataset, covariate panel or spec.
class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

// Cholesky pivot failed; pivot() is the zero-based failing index.
class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(std::size_t pivot, const std::string& what)
      : std::runtime_error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

// A sampler failed mid-run; message carries iteration / period context.
class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gb2ss

#endif  // GB2SS_ERRORS_HPP_
