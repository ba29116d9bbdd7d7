#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dproj {

// Precondition violated by the caller (bad shape, rank, parameter, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A spectral routine did not converge or produced non-finite output.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs are valid but lie outside the hypotheses of the requested bound.
class OutOfHypothesis : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A Monte Carlo replication failed; carries the replication index.
class ReplicationFailure : public std::runtime_error {
 public:
  ReplicationFailure(std::size_t index, const std::string& what)
      : std::runtime_error("replication " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace dproj
