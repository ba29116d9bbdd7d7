#include "dproj/linalg.hpp"

#include "dproj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dproj {

namespace {

double tie_tolerance(const std::vector<double>& values) {
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  return tol::kTieRel * scale;
}

// Snap chains of near-equal values (and values near zero) to a common value.
void snap_ties(std::vector<double>& values) {
  const double eps = tie_tolerance(values);
  for (double& v : values)
    if (v <= eps) v = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i - 1] - values[i] <= eps) values[i] = values[i - 1];
}

// Columns of `vecs` are aligned with `values` (nonincreasing). Returns an
// orthonormal M x r basis of a top-r invariant subspace, resolving a tie that
// straddles position r deterministically.
Matrix select_top(const std::vector<double>& values, const Matrix& vecs, std::size_t r) {
  const std::size_t m = values.size();
  const double eps = tie_tolerance(values);
  if (r == m || values[r - 1] - values[r] > eps) return vecs.leftCols(static_cast<Eigen::Index>(r));

  std::size_t lo = r - 1;
  while (lo > 0 && values[lo - 1] - values[lo] <= eps) --lo;
  std::size_t hi = r + 1;
  while (hi < m && values[hi - 1] - values[hi] <= eps) ++hi;

  const auto ilo = static_cast<Eigen::Index>(lo);
  const auto width = static_cast<Eigen::Index>(hi - lo);
  const Matrix tied = vecs.middleCols(ilo, width);

  Matrix basis(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(r));
  basis.leftCols(ilo) = vecs.leftCols(ilo);
  Eigen::Index filled = ilo;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(m) && filled < static_cast<Eigen::Index>(r); ++j) {
    Vector w = tied * tied.row(j).transpose();  // projection of e_j onto the tied block
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = ilo; k < filled; ++k) w -= basis.col(k).dot(w) * basis.col(k);
    }
    const double n = w.norm();
    if (n > 1e-6) basis.col(filled++) = w / n;
  }
  if (filled != static_cast<Eigen::Index>(r))
    throw NumericalFailure("tie-break completion did not reach the requested rank");
  return basis;
}

}  // namespace

void require_finite(const Matrix& a, std::string_view what) {
  if (a.size() == 0) throw InvalidInput(std::string(what) + ": empty matrix");
  if (!a.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entries");
}

void require_square(const Matrix& a, std::string_view what) {
  require_finite(a, what);
  if (a.rows() != a.cols())
    throw InvalidInput(std::string(what) + ": expected a square matrix, got " + std::to_string(a.rows()) +
                       "x" + std::to_string(a.cols()));
}

// ---------------------------------------------------------------------------

SingularSpectrum::SingularSpectrum(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0)
      throw InvalidInput("singular spectrum: values must be finite and nonnegative");
    if (i > 0 && values_[i] > values_[i - 1])
      throw InvalidInput("singular spectrum: values must be nonincreasing");
  }
}

double SingularSpectrum::head_energy(std::size_t r) const noexcept {
  double acc = 0.0;
  for (std::size_t i = 1; i <= std::min(r, values_.size()); ++i) acc += values_[i - 1] * values_[i - 1];
  return acc;
}

double SingularSpectrum::tail_energy(std::size_t r) const noexcept {
  double acc = 0.0;
  for (std::size_t i = r + 1; i <= 2 * r; ++i) acc += (*this)(i) * (*this)(i);
  return acc;
}

std::size_t SingularSpectrum::rank() const noexcept {
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](double v) { return v > 0.0; }));
}

// ---------------------------------------------------------------------------

OrthoProjection OrthoProjection::from_basis(Matrix basis) {
  require_finite(basis, "projection basis");
  if (basis.cols() < 1 || basis.cols() > basis.rows())
    throw InvalidInput("projection basis: need 1 <= rank <= dim");
  const Matrix gram = basis.transpose() * basis;
  const double defect = (gram - Matrix::Identity(gram.rows(), gram.cols())).norm();
  if (defect > tol::kOrth)
    throw InvalidInput("projection basis: columns are not orthonormal (defect " + std::to_string(defect) + ")");
  return OrthoProjection(std::move(basis));
}

OrthoProjection OrthoProjection::coordinate(std::size_t m, std::size_t r) {
  if (r < 1 || r > m) throw InvalidInput("coordinate projection: need 1 <= r <= M");
  return OrthoProjection(Matrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(r)));
}

double OrthoProjection::trace_with(const Matrix& s) const {
  // tr(Q Q^T S) = sum_k q_k^T S q_k
  return (basis_.transpose() * s * basis_).trace();
}

OrthoProjection make_trusted_projection(Matrix basis) { return OrthoProjection(std::move(basis)); }

// ---------------------------------------------------------------------------

SvdResult svd(const Matrix& a) {
  require_square(a, "svd");
  Eigen::BDCSVD<Matrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) throw NumericalFailure("svd: solver did not converge");
  const Vector& sv = solver.singularValues();
  std::vector<double> values(sv.data(), sv.data() + sv.size());
  snap_ties(values);
  return SvdResult{SingularSpectrum(std::move(values)), solver.matrixU(), solver.matrixV()};
}

SingularSpectrum singular_values(const Matrix& a) {
  require_square(a, "singular_values");
  Eigen::BDCSVD<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalFailure("singular_values: solver did not converge");
  const Vector& sv = solver.singularValues();
  std::vector<double> values(sv.data(), sv.data() + sv.size());
  snap_ties(values);
  return SingularSpectrum(std::move(values));
}

std::vector<double> gram_eigenvalues(const Matrix& a) {
  require_finite(a, "gram_eigenvalues");
  Matrix gram = Matrix::Zero(a.rows(), a.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(a);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("gram_eigenvalues: solver did not converge");
  const Vector& ev = solver.eigenvalues();
  std::vector<double> out(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) out[static_cast<std::size_t>(i)] = std::max(0.0, ev[ev.size() - 1 - i]);
  return out;
}

double schatten(const Matrix& a, Schatten p) {
  require_finite(a, "schatten");
  if (p == Schatten::Two) return a.norm();
  Eigen::BDCSVD<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalFailure("schatten: solver did not converge");
  return solver.singularValues()(0);
}

OrthoProjection best_rank_r_projection(const Matrix& a, std::size_t r) {
  require_square(a, "best_rank_r_projection");
  const auto m = static_cast<std::size_t>(a.rows());
  if (r < 1 || r > m) throw InvalidInput("best_rank_r_projection: need 1 <= r <= M");
  return top_left_projection(svd(a), r);
}

OrthoProjection top_left_projection(const SvdResult& dec, std::size_t r) {
  if (r < 1 || r > dec.spectrum.size()) throw InvalidInput("top_left_projection: need 1 <= r <= M");
  return make_trusted_projection(select_top(dec.spectrum.values(), dec.left, r));
}

ProjectionDistance proj_diff_norms(const OrthoProjection& p1, const OrthoProjection& p2) {
  if (p1.dim() != p2.dim() || p1.rank() != p2.rank())
    throw InvalidInput("proj_diff_norms: projections differ in dimension or rank");
  // Singular values of Q1^T Q2 are the cosines of the principal angles; the
  // nonzero eigenvalues of P1 - P2 are +-sin(theta_k).
  const Matrix cross = p1.basis().transpose() * p2.basis();
  const double r = static_cast<double>(p1.rank());
  const double s2sq = std::max(0.0, 2.0 * r - 2.0 * cross.squaredNorm());
  Eigen::JacobiSVD<Matrix> cs(cross);
  const double cmin = std::min(1.0, cs.singularValues().minCoeff());
  return ProjectionDistance{std::sqrt(s2sq), std::sqrt(std::max(0.0, 1.0 - cmin * cmin))};
}

double trace_form(const Matrix& a, const Matrix& d, const Matrix& b) {
  require_finite(a, "trace_form A");
  require_finite(d, "trace_form D");
  require_finite(b, "trace_form B");
  if (a.rows() != d.rows() || d.cols() != b.rows() || a.cols() != b.cols())
    throw InvalidInput("trace_form: shape mismatch");
  // tr(A^T D B) = sum_ij A_ij (D B)_ij
  return a.cwiseProduct(d * b).sum();
}

double trace_form(const Matrix& a, const OrthoProjection& plus, const OrthoProjection& minus, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || static_cast<std::size_t>(a.rows()) != plus.dim() ||
      plus.dim() != minus.dim())
    throw InvalidInput("trace_form: shape mismatch");
  const auto part = [&](const OrthoProjection& p) {
    return (p.basis().transpose() * a).cwiseProduct(p.basis().transpose() * b).sum();
  };
  return part(plus) - part(minus);
}

namespace {

void check_symmetric(const Matrix& s, double spectral_norm) {
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol::kSymRel * spectral_norm)
    throw InvalidInput("sym_top_r: matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
}

void check_rank(const Matrix& s, std::size_t r) {
  require_square(s, "sym_top_r");
  if (r < 1 || r > static_cast<std::size_t>(s.rows())) throw InvalidInput("sym_top_r: need 1 <= r <= M");
}

}  // namespace

SymTopR sym_top_r(const Matrix& s, std::size_t r) {
  check_rank(s, r);
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericalFailure("sym_top_r: solver did not converge");
  const Vector& ev = solver.eigenvalues();
  const Eigen::Index m = ev.size();
  check_symmetric(s, std::max(std::abs(ev[0]), std::abs(ev[m - 1])));

  std::vector<double> values(static_cast<std::size_t>(m));
  Matrix vecs(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    values[static_cast<std::size_t>(i)] = ev[m - 1 - i];
    vecs.col(i) = solver.eigenvectors().col(m - 1 - i);
  }
  double value = 0.0;
  for (std::size_t i = 0; i < r; ++i) value += values[i];
  return SymTopR{value, make_trusted_projection(select_top(values, vecs, r))};
}

double sym_top_r_value(const Matrix& s, std::size_t r) {
  check_rank(s, r);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("sym_top_r: solver did not converge");
  const Vector& ev = solver.eigenvalues();
  const Eigen::Index m = ev.size();
  check_symmetric(s, std::max(std::abs(ev[0]), std::abs(ev[m - 1])));
  double value = 0.0;
  for (std::size_t i = 0; i < r; ++i) value += ev[m - 1 - static_cast<Eigen::Index>(i)];
  return value;
}

}  // namespace dproj
