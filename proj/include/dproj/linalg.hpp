#pragma once

// Dense linear algebra for square real matrices: spectra, Schatten norms,
// rank-r orthogonal projections and their geometry.

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>
#include <vector>

namespace dproj {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace tol {
inline constexpr double kOrth = 1e-9;      // absolute, orthonormality of projection bases
inline constexpr double kRecon = 1e-10;    // relative, SVD reconstruction
inline constexpr double kSymRel = 1e-9;    // relative to ||S||_inf, symmetry check
inline constexpr double kTieRel = 1e-12;   // relative to the largest value, spectral ties
}  // namespace tol

void require_finite(const Matrix& a, std::string_view what);
void require_square(const Matrix& a, std::string_view what);

// r_M = min(r, M - r).
inline std::size_t effective_rank(std::size_t r, std::size_t m) { return r < m - r ? r : m - r; }

// Singular values lambda_1 >= ... >= lambda_M >= 0. Indexing is 1-based and
// reads as zero past the stored length, so tail sums such as
// sum_{i=r+1}^{2r} lambda_i^2 need no special casing when 2r > M.
class SingularSpectrum {
 public:
  SingularSpectrum() = default;
  explicit SingularSpectrum(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

  double operator()(std::size_t i) const noexcept {
    return (i >= 1 && i <= values_.size()) ? values_[i - 1] : 0.0;
  }

  // sum_{i<=r} lambda_i^2
  double head_energy(std::size_t r) const noexcept;
  double total_energy() const noexcept { return head_energy(values_.size()); }
  // Delta_r = sum_{i=r+1}^{2r} lambda_i^2
  double tail_energy(std::size_t r) const noexcept;
  // number of strictly positive values
  std::size_t rank() const noexcept;

 private:
  std::vector<double> values_;
};

// Rank-r orthogonal projection held as an M x r orthonormal basis.
class OrthoProjection {
 public:
  // Validates orthonormality within tol::kOrth.
  static OrthoProjection from_basis(Matrix basis);
  // Projection onto span(e_1, ..., e_r).
  static OrthoProjection coordinate(std::size_t m, std::size_t r);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(basis_.rows()); }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(basis_.cols()); }
  const Matrix& basis() const noexcept { return basis_; }

  Matrix dense() const { return basis_ * basis_.transpose(); }
  Matrix apply(const Matrix& a) const { return basis_ * (basis_.transpose() * a); }
  // ||P A||_{S2}^2
  double captured_energy(const Matrix& a) const { return (basis_.transpose() * a).squaredNorm(); }
  // tr(P S)
  double trace_with(const Matrix& s) const;

 private:
  explicit OrthoProjection(Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
  friend OrthoProjection make_trusted_projection(Matrix basis);
};

// Skips validation; for bases produced by orthogonal factorizations.
OrthoProjection make_trusted_projection(Matrix basis);

struct SvdResult {
  SingularSpectrum spectrum;
  Matrix left;
  Matrix right;
};

// Full SVD A = U diag(lambda) V^T. Values within tol::kTieRel * lambda_1 of each
// other (or of zero) are snapped together so ties are exact downstream.
SvdResult svd(const Matrix& a);
SingularSpectrum singular_values(const Matrix& a);

// Eigenvalues of A A^T in nonincreasing order, clamped at zero. These are the
// squared singular values; cheaper than an SVD when only energies are needed.
std::vector<double> gram_eigenvalues(const Matrix& a);

enum class Schatten { Two, Infinity };
double schatten(const Matrix& a, Schatten p);

// Projection onto the top-r left singular subspace of A. When lambda_r ties
// with lambda_{r+1}, the tied block is resolved by projecting e_1, e_2, ...
// onto the tied subspace and keeping them in index order.
OrthoProjection best_rank_r_projection(const Matrix& a, std::size_t r);
// Same selection from an already computed decomposition.
OrthoProjection top_left_projection(const SvdResult& dec, std::size_t r);

struct ProjectionDistance {
  double s2;    // ||P1 - P2||_{S2}
  double sinf;  // ||P1 - P2||_{S_inf}
};
ProjectionDistance proj_diff_norms(const OrthoProjection& p1, const OrthoProjection& p2);

// tr(A^T D B)
double trace_form(const Matrix& a, const Matrix& d, const Matrix& b);
// tr(A^T (P_plus - P_minus) B) without forming the dense difference.
double trace_form(const Matrix& a, const OrthoProjection& plus, const OrthoProjection& minus,
                  const Matrix& b);

struct SymTopR {
  double value;  // sum of the r largest eigenvalues
  OrthoProjection projection;
};
SymTopR sym_top_r(const Matrix& s, std::size_t r);
// Value only; skips eigenvectors.
double sym_top_r_value(const Matrix& s, std::size_t r);

}  // namespace dproj
