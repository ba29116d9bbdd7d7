#pragma once

// Closed-form bounds on the projection-excess process. All functions are
// pure; +infinity is represented by IEEE infinity and `min` over a set
// containing infinities ignores them naturally.
//
// Notation: lambda_i are singular values of the signal C (1-based, zero past
// M), r_M = min(r, M - r), Delta_r = sum_{i=r+1}^{2r} lambda_i^2, sigma_1 is
// the spectral norm of the noise, sigma^2 and m4 are the entry variance and
// fourth moment.

#include "dproj/linalg.hpp"
#include "dproj/randgen.hpp"

#include <cstddef>
#include <limits>
#include <optional>

namespace dproj {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Pathwise bound on sup Z1:
//   I'   = 4 r_M lambda_1 sigma_1
//   II'  = 4 r_M lambda_1^2 sigma_1^2 / (lambda_r^2 - lambda_{r+1}^2)     (inf on a tie)
//   III' = max(4 sqrt(r_M Delta_r) (lambda_1/lambda_r) sigma_1,
//              8 r_M (lambda_1/lambda_r)^2 sigma_1^2)                    (inf if lambda_r = 0)
//   Y    = min(I', II', III')
struct SignalSupBound {
  double i_prime;
  double ii_prime;
  double iii_prime;
  double y;
};
SignalSupBound prop1_Y(const SingularSpectrum& spectrum, std::size_t m, std::size_t r, double sigma1);

// Expectation bound E sup Z <~ r (M - r) min(I, II, III):
//   I   = sigma^2 + sqrt(m4) + (lambda_1 / sqrt M)(sigma + m4^{1/4})
//   II  = lambda_r^2 / (lambda_r^2 - lambda_{r+1}^2) (sigma^2 + sqrt(m4))          (inf on a tie)
//   III = (lambda_1/lambda_r)^2 (sigma^2 + sqrt(m4))
//         + sqrt(lambda_1^2 Delta_r / (r (M - r) lambda_r^2)) (sigma + m4^{1/4})   (inf if lambda_r = 0)
// `value` uses multiplicative constant 1.
struct UniversalBound {
  double i;
  double ii;
  double iii;
  double value;
};
UniversalBound thm3_bound(const SingularSpectrum& spectrum, std::size_t m, std::size_t r, double sigma_sq,
                          double m4);

// Gaussian-noise bound (constant 1), valid for r <= M/2 and lambda_r > 0:
//   sigma^2 r M [ min(lambda_1^2/lambda_r^2, 1 + lambda_1/(sigma sqrt M))
//               + min(sqrt(Delta_r / (r lambda_r^2)) lambda_1/(sigma sqrt M),
//                     lambda_1^2 / (lambda_r^2 - lambda_{r+1}^2)) ]
// Throws OutOfHypothesis outside that range.
double thm1_gaussian_bound(const SingularSpectrum& spectrum, std::size_t m, std::size_t r, double sigma);

// M (sigma^2 + sqrt(m4)), the constant-1 form of E sigma_1^2 <~ M (sigma^2 + sqrt(m4)).
double latala_rhs(std::size_t m, double sigma_sq, double m4);

// sqrt(2 r_M) ||A||_{S_inf} ||B||_{S_inf} ||P2 - P1||_{S2}, an upper bound for
// tr(A^T (P2 - P1) B).
double lemma1_rhs(const Matrix& a, const Matrix& b, const OrthoProjection& p1, const OrthoProjection& p2);

// A tuple attaining equality in the trace bound:
// P1 = sum u_i u_i^T, P2 = sum (sqrt(1-alpha^2) u_i + alpha v_i)(...)^T with
// u_i = e_i, v_i = e_{r+i}; A = mu Id, B = nu (P1 - P2). Then
// tr(A^T (P1 - P2) B) = 2 r mu nu alpha^2 = lemma1_rhs(A, B, P2, P1).
struct TraceEqualityInstance {
  Matrix a;
  Matrix b;
  OrthoProjection p1;
  OrthoProjection p2;
};
TraceEqualityInstance lemma1_equality_instance(std::size_t m, std::size_t r, double alpha, double mu, double nu);

// Drift bounds for ||P C||^2 - ||pi_r C||^2 at distance d = ||P - pi_r||_{S2}:
//   rhs_i  = -(1/2)(lambda_r^2 - lambda_{r+1}^2) d^2                 (always)
//   rhs_ii = -(1/2) lambda_r^2 d^2 + Delta_r    when gate_ii, i.e. d >= sqrt(2 Delta_r)/lambda_r
// With lambda_r = 0 the gate is closed and rhs_ii is +inf.
struct DriftBound {
  double rhs_i;
  double rhs_ii;
  bool gate_ii;
};
DriftBound lemma2_rhs(const SingularSpectrum& spectrum, std::size_t r, double dist_s2);

// Terms of the comparison between the Gaussian bound bracket and the
// Gaussian rewrite of the universal bound. With
//   a = lambda_1^2/lambda_r^2, b = 1 + lambda_1/(sigma sqrt M),
//   c = sqrt(Delta_r/(r lambda_r^2)) lambda_1/(sigma sqrt M),
//   d = lambda_1^2/(lambda_r^2 - lambda_{r+1}^2),
// the chain is
//   lhs = min(a,b) + min(c,d) <= min(b+c, a+d, a+c)
//       <= 2 min(b, d, a+c) = 2 rhs <= 2 min(b, a+d, a+c) <= 2 lhs.
struct GaussianEquivalence {
  double a, b, c, d;
  double lhs;         // min(a,b) + min(c,d)
  double step1;       // min(b+c, a+d, a+c)
  double rhs;         // min(b, d, a+c)
  double step3;       // min(b, a+d, a+c)
  bool chain_holds(double rel_tol = 1e-12) const;
};
GaussianEquivalence min_equiv_witness(const SingularSpectrum& spectrum, std::size_t m, std::size_t r,
                                      double sigma);

// r (M - r) <= r_M M <= 2 r (M - r)
bool sandwich_holds(std::size_t r, std::size_t m);

// Every bound for one configuration.
struct BoundReport {
  double I;
  double II;
  double III;
  double I_prime;
  double II_prime;
  double III_prime;
  double Y;
  double thm3_value;
  std::optional<double> thm1_gaussian;
  double latala_rhs;
  std::size_t r_M;
  double delta_r;
  double sigma1;  // noise spectral norm plugged into I', II', III'
};
BoundReport make_bound_report(const SingularSpectrum& spectrum, std::size_t m, std::size_t r,
                              const EntryDistribution& dist, double sigma1);

}  // namespace dproj
