#pragma once

// Real sequences u_1, u_2, ... given by a rule; used for the leading singular
// vector of rank-one signals and for covariance quadratic forms.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dproj {

class SequenceRule {
 public:
  enum class Kind { Ones, FiniteSupport, Custom };

  static SequenceRule ones();
  // u_i = 1 for i <= k, 0 afterwards
  static SequenceRule finite_support(std::size_t k);
  // Explicit values; reading past the end yields zeros.
  static SequenceRule custom(std::vector<double> values);
  // "ones", "finite:k", "file:path" (whitespace/comma separated numbers)
  static SequenceRule parse(std::string_view spec);

  Kind kind() const noexcept { return kind_; }
  std::string to_string() const;

  double at(std::size_t i) const noexcept;  // 1-based
  std::vector<double> prefix(std::size_t m) const;

 private:
  Kind kind_ = Kind::Ones;
  std::size_t support_ = 0;
  std::vector<double> values_;
  std::string source_;
};

}  // namespace dproj
