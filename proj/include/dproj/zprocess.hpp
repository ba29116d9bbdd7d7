#pragma once

// The projection-excess process
//   Z(P) = ||P X||_{S2}^2 - ||pi_r X||_{S2}^2,   X = C + E,
// split as Z = Z1 + Z2 with
//   Z1(P) = ||P C||^2 - ||pi_r C||^2 + 2 tr(E^T (P - pi_r) C),
//   Z2(P) = ||P E||^2 - ||pi_r E||^2,
// where pi_r is the best rank-r projection for C. All three suprema over
// rank-r projections reduce to spectral problems and are computed exactly.

#include "dproj/linalg.hpp"

#include <cstddef>

namespace dproj {

struct ZDecomposition {
  double z;
  double z1;
  double z2;
  OrthoProjection at;
};

struct SupResult {
  double value;
  OrthoProjection maximizer;
};

// Fixed signal C and rank r. pi_r and C C^T are computed once at
// construction; the object is immutable afterwards and may be shared by
// concurrent workers.
class ExcessProcess {
 public:
  ExcessProcess(Matrix signal, std::size_t r);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(signal_.rows()); }
  std::size_t rank() const noexcept { return rank_; }
  const Matrix& signal() const noexcept { return signal_; }
  const OrthoProjection& oracle() const noexcept { return oracle_; }
  const SingularSpectrum& signal_spectrum() const noexcept { return spectrum_; }

  ZDecomposition at(const Matrix& noise, const OrthoProjection& p) const;

  SupResult sup(const Matrix& noise) const;
  // Sup of Z1 via Z1(P) = tr(P S) - tr(pi_r S), S = CC^T + CE^T + EC^T.
  SupResult sup_signal(const Matrix& noise) const;
  SupResult sup_noise(const Matrix& noise) const;

  struct SupValues {
    double z;
    double z1;
    double z2;
    double sigma1;  // ||E||_{S_inf}
    double scale;   // ||X||_{S2}^2 + ||C||_{S2}^2, the natural roundoff scale
  };
  // All three suprema and sigma_1(E) from eigenvalues only.
  SupValues sup_values(const Matrix& noise) const;

  // ||pi_r X||_{S2}^2
  double oracle_energy(const Matrix& noise) const;

 private:
  void check_noise(const Matrix& noise) const;
  Matrix cross_gram(const Matrix& noise) const;

  Matrix signal_;
  std::size_t rank_;
  SingularSpectrum spectrum_;
  OrthoProjection oracle_;
  Matrix signal_gram_;
};

ZDecomposition z_at(const Matrix& c, const Matrix& e, const OrthoProjection& p, std::size_t r);
SupResult z_sup(const Matrix& c, const Matrix& e, std::size_t r);
SupResult z1_sup(const Matrix& c, const Matrix& e, std::size_t r);
SupResult z2_sup(const Matrix& c, const Matrix& e, std::size_t r);

}  // namespace dproj
