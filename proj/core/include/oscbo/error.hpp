#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscbo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Non-positive lengthscale, dimension mismatch, or unsupported smoothness.
class InvalidKernel : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Cholesky factorization failed at every jitter level tried.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, std::vector<double> attempted_jitter)
      : Error(what), attempted_jitter_(std::move(attempted_jitter)) {}

  const std::vector<double>& attempted_jitter() const noexcept { return attempted_jitter_; }

 private:
  std::vector<double> attempted_jitter_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed tabular input. `row` is the 1-based data row (header excluded).
class IngestionError : public Error {
 public:
  IngestionError(const std::string& what, std::size_t row)
      : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace oscbo
