#include "dproj/bounds.hpp"

#include "dproj/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dproj {

namespace {

void check_rank(std::size_t m, std::size_t r, const char* what) {
  if (r < 1 || r >= m) throw InvalidInput(std::string(what) + ": need 1 <= r < M");
}

void check_moments(double sigma_sq, double m4, const char* what) {
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) throw InvalidInput(std::string(what) + ": sigma^2 must be positive");
  if (!std::isfinite(m4) || m4 < sigma_sq * sigma_sq * (1.0 - 1e-12))
    throw InvalidInput(std::string(what) + ": fourth moment below sigma^4 violates Jensen");
}

double min3(double x, double y, double z) { return std::min(x, std::min(y, z)); }

}  // namespace

SignalSupBound prop1_Y(const SingularSpectrum& spectrum, std::size_t m, std::size_t r, double sigma1) {
  check_rank(m, r, "prop1_Y");
  if (!(sigma1 >= 0.0) || !std::isfinite(sigma1)) throw InvalidInput("prop1_Y: sigma1 must be nonnegative");
  const double rm = static_cast<double>(effective_rank(r, m));
  const double l1 = spectrum(1);
  const double lr = spectrum(r);
  const double lr1 = spectrum(r + 1);
  const double delta = spectrum.tail_energy(r);

  SignalSupBound out{};
  out.i_prime = 4.0 * rm * l1 * sigma1;
  out.ii_prime = lr > lr1 ? 4.0 * rm * l1 * l1 * sigma1 * sigma1 / (lr * lr - lr1 * lr1) : kInf;
  if (lr > 0.0) {
    const double ratio = l1 / lr;
    out.iii_prime = std::max(4.0 * std::sqrt(rm * delta) * ratio * sigma1, 8.0 * rm * ratio * ratio * sigma1 * sigma1);
  } else {
    out.iii_prime = kInf;
  }
  out.y = min3(out.i_prime, out.ii_prime, out.iii_prime);
  return out;
}

UniversalBound thm3_bound(const SingularSpectrum& spectrum, std::size_t m, std::size_t r, double sigma_sq,
                          double m4) {
  check_rank(m, r, "thm3_bound");
  check_moments(sigma_sq, m4, "thm3_bound");
  const double md = static_cast<double>(m);
  const double rd = static_cast<double>(r);
  const double sigma = std::sqrt(sigma_sq);
  const double root4 = std::sqrt(std::sqrt(m4));
  const double second = sigma_sq + std::sqrt(m4);
  const double first = sigma + root4;
  const double l1 = spectrum(1);
  const double lr = spectrum(r);
  const double lr1 = spectrum(r + 1);
  const double delta = spectrum.tail_energy(r);

  UniversalBound out{};
  out.i = second + l1 / std::sqrt(md) * first;
  out.ii = lr > lr1 ? lr * lr / (lr * lr - lr1 * lr1) * second : kInf;
  out.iii = lr > 0.0 ? (l1 * l1) / (lr * lr) * second +
                           std::sqrt(l1 * l1 * delta / (rd * (md - rd) * lr * lr)) * first
                     : kInf;
  out.value = rd * (md - rd) * min3(out.i, out.ii, out.iii);
  return out;
}

namespace {

void check_gaussian_hypotheses(const SingularSpectrum& spectrum, std::size_t m, std::size_t r, double sigma,
                               const char* what) {
  if (r < 1 || m < 1) throw InvalidInput(std::string(what) + ": need r >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput(std::string(what) + ": sigma must be positive");
  if (2 * r > m) throw OutOfHypothesis(std::string(what) + ": requires r <= M/2");
  if (!(spectrum(r) > 0.0)) throw OutOfHypothesis(std::string(what) + ": requires rank(C) >= r");
}

GaussianEquivalence gaussian_terms(const SingularSpectrum& spectrum, std::size_t m, std::size_t r, double sigma) {
  const double l1 = spectrum(1);
  const double lr = spectrum(r);
  const double lr1 = spectrum(r + 1);
  const double snr = l1 / (sigma * std::sqrt(static_cast<double>(m)));
  GaussianEquivalence g{};
  g.a = (l1 * l1) / (lr * lr);
  g.b = 1.0 + snr;
  g.c = std::sqrt(spectrum.tail_energy(r) / (static_cast<double>(r) * lr * lr)) * snr;
  g.d = lr > lr1 ? l1 * l1 / (lr * lr - lr1 * lr1) : kInf;
  g.lhs = std::min(g.a, g.b) + std::min(g.c, g.d);
  g.step1 = min3(g.b + g.c, g.a + g.d, g.a + g.c);
  g.rhs = min3(g.b, g.d, g.a + g.c);
  g.step3 = min3(g.b, g.a + g.d, g.a + g.c);
  return g;
}

}  // namespace

double thm1_gaussian_bound(const SingularSpectrum& spectrum, std::size_t m, std::size_t r, double sigma) {
  check_gaussian_hypotheses(spectrum, m, r, sigma, "thm1_gaussian_bound");
  const GaussianEquivalence g = gaussian_terms(spectrum, m, r, sigma);
  return sigma * sigma * static_cast<double>(r) * static_cast<double>(m) * g.lhs;
}

GaussianEquivalence min_equiv_witness(const SingularSpectrum& spectrum, std::size_t m, std::size_t r, double sigma) {
  check_gaussian_hypotheses(spectrum, m, r, sigma, "min_equiv_witness");
  return gaussian_terms(spectrum, m, r, sigma);
}

bool GaussianEquivalence::chain_holds(double rel_tol) const {
  const auto le = [rel_tol](double x, double y) { return x <= y * (1.0 + rel_tol); };
  return le(lhs, step1) && le(step1, 2.0 * rhs) && le(rhs, step3) && le(step3, lhs);
}

double latala_rhs(std::size_t m, double sigma_sq, double m4) {
  if (m < 1) throw InvalidInput("latala_rhs: M must be at least 1");
  check_moments(sigma_sq, m4, "latala_rhs");
  return static_cast<double>(m) * (sigma_sq + std::sqrt(m4));
}

double lemma1_rhs(const Matrix& a, const Matrix& b, const OrthoProjection& p1, const OrthoProjection& p2) {
  require_square(a, "lemma1_rhs A");
  require_square(b, "lemma1_rhs B");
  if (a.rows() != b.rows() || static_cast<std::size_t>(a.rows()) != p1.dim())
    throw InvalidInput("lemma1_rhs: shape mismatch");
  const ProjectionDistance dist = proj_diff_norms(p1, p2);
  const double rm = static_cast<double>(effective_rank(p1.rank(), p1.dim()));
  return std::sqrt(2.0 * rm) * schatten(a, Schatten::Infinity) * schatten(b, Schatten::Infinity) * dist.s2;
}

TraceEqualityInstance lemma1_equality_instance(std::size_t m, std::size_t r, double alpha, double mu, double nu) {
  if (r < 1 || m < 2 * r) throw InvalidInput("lemma1_equality_instance: requires M >= 2r");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("lemma1_equality_instance: alpha must lie in [0, 1]");
  if (!(mu > 0.0) || !(nu > 0.0)) throw InvalidInput("lemma1_equality_instance: mu and nu must be positive");
  const auto n = static_cast<Eigen::Index>(m);
  const auto k = static_cast<Eigen::Index>(r);
  Matrix u = Matrix::Identity(n, k);
  Matrix tilted = Matrix::Zero(n, k);
  const double keep = std::sqrt(1.0 - alpha * alpha);
  for (Eigen::Index i = 0; i < k; ++i) {
    tilted(i, i) = keep;
    tilted(k + i, i) = alpha;
  }
  OrthoProjection p1 = OrthoProjection::from_basis(std::move(u));
  OrthoProjection p2 = OrthoProjection::from_basis(std::move(tilted));
  Matrix a = mu * Matrix::Identity(n, n);
  Matrix b = nu * (p1.dense() - p2.dense());
  return TraceEqualityInstance{std::move(a), std::move(b), std::move(p1), std::move(p2)};
}

DriftBound lemma2_rhs(const SingularSpectrum& spectrum, std::size_t r, double dist_s2) {
  const std::size_t m = spectrum.size();
  if (r < 1 || r > m) throw InvalidInput("lemma2_rhs: need 1 <= r <= M");
  if (!(dist_s2 >= 0.0)) throw InvalidInput("lemma2_rhs: distance must be nonnegative");
  if (dist_s2 > std::sqrt(2.0 * static_cast<double>(effective_rank(r, m))) + 1e-9)
    throw InvalidInput("lemma2_rhs: distance exceeds sqrt(2 r_M)");
  const double lr = spectrum(r);
  const double lr1 = spectrum(r + 1);
  const double delta = spectrum.tail_energy(r);
  const double d2 = dist_s2 * dist_s2;
  DriftBound out{};
  out.rhs_i = -0.5 * (lr * lr - lr1 * lr1) * d2;
  if (lr > 0.0) {
    out.rhs_ii = -0.5 * lr * lr * d2 + delta;
    out.gate_ii = dist_s2 >= std::sqrt(2.0 * delta) / lr;
  } else {
    out.rhs_ii = kInf;
    out.gate_ii = false;
  }
  return out;
}

bool sandwich_holds(std::size_t r, std::size_t m) {
  const std::size_t lower = r * (m - r);
  const std::size_t mid = effective_rank(r, m) * m;
  return lower <= mid && mid <= 2 * lower;
}

BoundReport make_bound_report(const SingularSpectrum& spectrum, std::size_t m, std::size_t r,
                              const EntryDistribution& dist, double sigma1) {
  const SignalSupBound y = prop1_Y(spectrum, m, r, sigma1);
  const UniversalBound u = thm3_bound(spectrum, m, r, dist.variance(), dist.fourth_moment());
  BoundReport rep{};
  rep.I = u.i;
  rep.II = u.ii;
  rep.III = u.iii;
  rep.I_prime = y.i_prime;
  rep.II_prime = y.ii_prime;
  rep.III_prime = y.iii_prime;
  rep.Y = y.y;
  rep.thm3_value = u.value;
  if (dist.kind() == DistKind::Gaussian && 2 * r <= m && spectrum(r) > 0.0)
    rep.thm1_gaussian = thm1_gaussian_bound(spectrum, m, r, dist.scale());
  rep.latala_rhs = latala_rhs(m, dist.variance(), dist.fourth_moment());
  rep.r_M = effective_rank(r, m);
  rep.delta_r = spectrum.tail_energy(r);
  rep.sigma1 = sigma1;
  return rep;
}

}  // namespace dproj
