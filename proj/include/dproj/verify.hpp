#pragma once

// Pathwise verification suites. Each trial draws fresh random inputs from
// labelled streams, evaluates one inequality and records a reproducer for
// every violation.

#include "dproj/linalg.hpp"
#include "dproj/montecarlo.hpp"
#include "dproj/randgen.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace dproj {

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t violations = 0;
  // smallest (rhs - lhs) / scale seen; negative means a violation
  double worst_margin = kInf;
  std::vector<std::string> reproducers;

  bool passed() const noexcept { return violations == 0; }
  void record(double lhs, double rhs, double slack, double scale, const std::string& reproducer);
};

struct VerifyConfig {
  std::size_t m = 8;
  std::size_t r = 2;
  EntryDistribution dist = EntryDistribution::gaussian(1.0);
  // Signal for the prop1 / lemma2 / decomposition suites; nullopt draws a
  // fresh Gaussian C each trial.
  std::optional<SignalSpec> signal;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  // Haar projections evaluated per trial in the lemma2 / decomposition suites.
  std::size_t projections_per_trial = 10;

  void validate() const;
};

// z1_sup <= Y (1 + 1e-8).
SuiteResult verify_prop1(const VerifyConfig& cfg);
// tr(A^T (P2 - P1) B) <= lemma1_rhs + 1e-9 scale on random Gaussian A, B and
// Haar P1, P2.
SuiteResult verify_lemma1(const VerifyConfig& cfg);
// Drift bounds (i) always and (ii) under their gate at Haar projections.
SuiteResult verify_lemma2(const VerifyConfig& cfg);
// z = z1 + z2 at Haar projections; the three suprema dominate every sampled
// value and sup Z <= sup Z1 + sup Z2.
SuiteResult verify_decomposition(const VerifyConfig& cfg);
// r (M - r) <= r_M M <= 2 r (M - r) for every 1 <= r < M, M <= m_max.
SuiteResult verify_sandwich(std::size_t m_max);

// All five suites; sandwich runs exhaustively up to cfg.m.
std::vector<SuiteResult> verify_all(const VerifyConfig& cfg);

}  // namespace dproj
