#include "dproj/zprocess.hpp"

#include "dproj/errors.hpp"

#include <cmath>

namespace dproj {

namespace {

SingularSpectrum checked_spectrum(const Matrix& c, std::size_t r) {
  require_square(c, "signal matrix");
  if (r < 1 || r > static_cast<std::size_t>(c.rows())) throw InvalidInput("rank r must satisfy 1 <= r <= M");
  return singular_values(c);
}

double head_sum(const std::vector<double>& v, std::size_t r) {
  double acc = 0.0;
  for (std::size_t i = 0; i < r; ++i) acc += v[i];
  return acc;
}

}  // namespace

ExcessProcess::ExcessProcess(Matrix signal, std::size_t r)
    : signal_(std::move(signal)),
      rank_(r),
      spectrum_(checked_spectrum(signal_, r)),
      oracle_(best_rank_r_projection(signal_, r)),
      signal_gram_(signal_ * signal_.transpose()) {}

void ExcessProcess::check_noise(const Matrix& noise) const {
  require_finite(noise, "noise matrix");
  if (noise.rows() != signal_.rows() || noise.cols() != signal_.cols())
    throw InvalidInput("noise matrix shape does not match the signal");
}

Matrix ExcessProcess::cross_gram(const Matrix& noise) const {
  const Matrix ce = signal_ * noise.transpose();
  return signal_gram_ + ce + ce.transpose();
}

double ExcessProcess::oracle_energy(const Matrix& noise) const {
  check_noise(noise);
  return oracle_.captured_energy(signal_ + noise);
}

ZDecomposition ExcessProcess::at(const Matrix& noise, const OrthoProjection& p) const {
  check_noise(noise);
  if (p.dim() != dim() || p.rank() != rank_) throw InvalidInput("projection dimension or rank mismatch");
  const Matrix x = signal_ + noise;
  const double z = p.captured_energy(x) - oracle_.captured_energy(x);
  const double drift = p.captured_energy(signal_) - oracle_.captured_energy(signal_);
  const double z1 = drift + 2.0 * trace_form(noise, p, oracle_, signal_);
  const double z2 = p.captured_energy(noise) - oracle_.captured_energy(noise);
  return ZDecomposition{z, z1, z2, p};
}

SupResult ExcessProcess::sup(const Matrix& noise) const {
  check_noise(noise);
  const Matrix x = signal_ + noise;
  const SvdResult dec = svd(x);
  return SupResult{dec.spectrum.head_energy(rank_) - oracle_.captured_energy(x), top_left_projection(dec, rank_)};
}

SupResult ExcessProcess::sup_signal(const Matrix& noise) const {
  check_noise(noise);
  const Matrix s = cross_gram(noise);
  SymTopR top = sym_top_r(s, rank_);
  return SupResult{top.value - oracle_.trace_with(s), std::move(top.projection)};
}

SupResult ExcessProcess::sup_noise(const Matrix& noise) const {
  check_noise(noise);
  const SvdResult dec = svd(noise);
  return SupResult{dec.spectrum.head_energy(rank_) - oracle_.captured_energy(noise), top_left_projection(dec, rank_)};
}

ExcessProcess::SupValues ExcessProcess::sup_values(const Matrix& noise) const {
  check_noise(noise);
  const Matrix x = signal_ + noise;
  const std::vector<double> gx = gram_eigenvalues(x);
  const std::vector<double> ge = gram_eigenvalues(noise);
  const Matrix s = cross_gram(noise);
  SupValues out{};
  out.z = head_sum(gx, rank_) - oracle_.captured_energy(x);
  out.z1 = sym_top_r_value(s, rank_) - oracle_.trace_with(s);
  out.z2 = head_sum(ge, rank_) - oracle_.captured_energy(noise);
  out.sigma1 = std::sqrt(ge.front());
  out.scale = x.squaredNorm() + signal_.squaredNorm();
  return out;
}

ZDecomposition z_at(const Matrix& c, const Matrix& e, const OrthoProjection& p, std::size_t r) {
  return ExcessProcess(c, r).at(e, p);
}
SupResult z_sup(const Matrix& c, const Matrix& e, std::size_t r) { return ExcessProcess(c, r).sup(e); }
SupResult z1_sup(const Matrix& c, const Matrix& e, std::size_t r) { return ExcessProcess(c, r).sup_signal(e); }
SupResult z2_sup(const Matrix& c, const Matrix& e, std::size_t r) { return ExcessProcess(c, r).sup_noise(e); }

}  // namespace dproj
