#pragma once

// Largest singular value of C_M + E_M for normalized noise E_M = (E_ij)/sqrt(M),
// the tail condition on the leading singular vector, the covariance quadratic
// form u~^T E_M E_M^T u~ and its strong law, and energy-based rank selection.

#include "dproj/linalg.hpp"
#include "dproj/randgen.hpp"
#include "dproj/sequence.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dproj {

struct SequenceCondition {
  double beta = 2.0;        // > 1
  double beta_prime = 0.5;  // > 0
  double c = 1.0;           // > 0
  void validate() const;
};

struct SingularInterval {
  double lower;
  double upper;
  bool contains(double x, double slack = 0.0) const { return x >= lower - slack && x <= upper + slack; }
};

// [sqrt(l1^2 + s^2), sqrt(l1^2 + 4 s^2 + 16 s^2 l1^2 / (l1^2 - l2^2))]
SingularInterval singular_interval(double lambda1, double lambda2, double sigma);

// max(1, floor((M^{1/beta} - 1)^beta))
std::size_t tail_index_B(std::size_t m, double beta);

struct TailVerdict {
  std::size_t m;
  std::size_t b;
  double ratio;      // sum_{i=B}^M u_i^2 / sum_{i=1}^M u_i^2
  double threshold;  // c M^{-beta'}
  bool holds;
};
// One verdict per M in `grid` (default: every M = 1..u.size()). Throws
// InvalidInput when a tested prefix is identically zero.
std::vector<TailVerdict> check_tail_condition(std::span<const double> u, const SequenceCondition& cond,
                                              std::vector<std::size_t> grid = {});

// u~^T E E^T u~ with u~ = u / ||u||; E is expected already normalized.
double covariance_quadratic_form(std::span<const double> u, const Matrix& e_norm);

struct TrajectoryPoint {
  std::size_t m;
  double z;
};
// Z_M for every M in the increasing grid, from one realization of the
// infinite array: the matrix at M is the leading block of the matrix at the
// next grid point. Rows where u vanishes are never generated.
std::vector<TrajectoryPoint> slln_trajectory(const SequenceRule& rule, const EntryDistribution& dist,
                                             const std::vector<std::size_t>& grid, const Seed& seed);

// u~^T E_M v~ over the support of u (u~, v~ unit vectors, E_M normalized).
double cross_term(const SequenceRule& u, const SequenceRule& v, const EntryDistribution& dist, std::size_t m,
                  const Seed& seed);

// lambda_1(C + E_M) for E_M drawn with `seed` and normalized by sqrt(M).
double spiked_top_singular(const Matrix& c, const EntryDistribution& dist, const Seed& seed);

struct RankSelectionConfig {
  double alpha = 0.9;     // in (0, 1]
  double sigma_sq = 0.0;  // known noise variance per entry, >= 0
  void validate() const;
};

// Smallest r >= 1 with sum_{i<=r} lambda_i^2 / sum_i lambda_i^2 >= alpha.
std::size_t rank_select(const SingularSpectrum& spectrum, const RankSelectionConfig& cfg);

// rank_select applied to noise-corrected energies
//   e_r = max(0, sum_{i<=r} lambda_i(X)^2 - sigma^2 r M)   (running max, so nondecreasing)
// normalized by e_cap, where cap counts singular values of X above the noise
// edge 2 sigma sqrt(M). With sigma = 0 this is rank_select(spectrum(X)).
// nullopt means no detectable signal (e_cap = 0).
std::optional<std::size_t> empirical_rank_select(const Matrix& x, const RankSelectionConfig& cfg);
std::optional<std::size_t> empirical_rank_select(const SingularSpectrum& spectrum, std::size_t m,
                                                 const RankSelectionConfig& cfg);

}  // namespace dproj
