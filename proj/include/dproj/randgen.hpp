#pragma once

// Seeded i.i.d.-entry random matrices with analytically known moments, and
// Haar-uniform random projections.

#include "dproj/linalg.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace dproj {

enum class DistKind { Gaussian, Rademacher, UniformSymmetric, CenteredExponential, StudentT };

// Centered entry law. `scale` is the standard deviation except for
// uniform-symmetric, where it is the half-width a of [-a, a].
class EntryDistribution {
 public:
  static EntryDistribution gaussian(double scale);
  static EntryDistribution rademacher(double scale);
  static EntryDistribution uniform_symmetric(double half_width);
  static EntryDistribution centered_exponential(double scale);
  // Student-t with nu > 4 degrees of freedom rescaled to variance scale^2.
  static EntryDistribution student_t(double nu, double scale);

  // "gaussian:1.0", "rademacher:1.0", "uniform:1.0", "exponential:1.0",
  // "student-t:5:1.0". Long kind names (uniform-symmetric,
  // centered-exponential) are accepted as well.
  static EntryDistribution parse(std::string_view spec);
  std::string to_string() const;

  DistKind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }
  double nu() const noexcept { return nu_; }

  double variance() const noexcept;
  double fourth_moment() const noexcept;

  double draw(std::mt19937_64& engine) const;

 private:
  EntryDistribution(DistKind kind, double scale, double nu);
  DistKind kind_;
  double scale_;
  double nu_;
};

// A root seed plus stream labels. Every (root, experiment, replication)
// triple names an independent family of streams.
struct Seed {
  std::uint64_t root = 0;
  std::uint64_t experiment = 0;
  std::uint64_t replication = 0;

  Seed with_replication(std::uint64_t k) const { return Seed{root, experiment, k}; }
};

enum class StreamDomain : std::uint64_t { MatrixRow = 1, Projection = 2, Auxiliary = 3 };

std::uint64_t stream_key(const Seed& seed, StreamDomain domain, std::uint64_t index);
std::mt19937_64 make_engine(const Seed& seed, StreamDomain domain, std::uint64_t index = 0);

enum class Normalization { None, InvSqrtM };

// Raw entries of row `row`, columns 0..out.size()-1. Row i of every matrix
// drawn from the same seed starts with these values, so leading blocks of
// larger matrices coincide with smaller ones.
void sample_row(const EntryDistribution& dist, const Seed& seed, std::size_t row, std::span<double> out);

Matrix sample_matrix(const EntryDistribution& dist, std::size_t m, const Seed& seed,
                     Normalization norm = Normalization::None);

// Haar-uniform rank-r projection in R^M via QR of an M x r Gaussian matrix.
OrthoProjection sample_projection(std::size_t m, std::size_t r, const Seed& seed);

}  // namespace dproj
