#include "dproj/errors.hpp"
#include "dproj/randgen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

using namespace dproj;

namespace {

std::vector<EntryDistribution> catalog() {
  return {EntryDistribution::gaussian(1.3), EntryDistribution::rademacher(0.7),
          EntryDistribution::uniform_symmetric(2.0), EntryDistribution::centered_exponential(1.1),
          EntryDistribution::student_t(10.0, 1.0), EntryDistribution::student_t(5.0, 1.0)};
}

struct Moments {
  double m2, m4, se2, se4;
};

// Empirical second and fourth moments with their standard errors.
Moments empirical(const EntryDistribution& d, std::size_t n, std::uint64_t seed) {
  auto eng = make_engine(Seed{seed, 0, 0}, StreamDomain::Auxiliary);
  double s2 = 0, s4 = 0, s22 = 0, s44 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = d.draw(eng);
    const double x2 = x * x, x4 = x2 * x2;
    s2 += x2;
    s4 += x4;
    s22 += x2 * x2;
    s44 += x4 * x4;
  }
  const double nd = static_cast<double>(n);
  const double m2 = s2 / nd, m4 = s4 / nd;
  return {m2, m4, std::sqrt((s22 / nd - m2 * m2) / nd), std::sqrt((s44 / nd - m4 * m4) / nd)};
}

}  // namespace

TEST(Distribution, RademacherValues) {
  const Matrix e = sample_matrix(EntryDistribution::rademacher(0.25), 3, Seed{5, 0, 0});
  for (Eigen::Index i = 0; i < e.size(); ++i) EXPECT_TRUE(e.data()[i] == 0.25 || e.data()[i] == -0.25);
}

TEST(Distribution, AnalyticMoments) {
  const auto g = EntryDistribution::gaussian(2.0);
  EXPECT_DOUBLE_EQ(g.variance(), 4.0);
  EXPECT_DOUBLE_EQ(g.fourth_moment(), 48.0);
  EXPECT_DOUBLE_EQ(EntryDistribution::uniform_symmetric(3.0).variance(), 3.0);
  EXPECT_DOUBLE_EQ(EntryDistribution::uniform_symmetric(3.0).fourth_moment(), 81.0 / 5.0);
  EXPECT_DOUBLE_EQ(EntryDistribution::rademacher(2.0).fourth_moment(), 16.0);
  EXPECT_DOUBLE_EQ(EntryDistribution::centered_exponential(1.0).fourth_moment(), 9.0);
  EXPECT_DOUBLE_EQ(EntryDistribution::student_t(5.0, 1.0).fourth_moment(), 9.0);
  EXPECT_DOUBLE_EQ(EntryDistribution::student_t(5.0, 2.0).variance(), 4.0);
}

TEST(Distribution, JensenHoldsForCatalog) {
  for (const auto& d : catalog()) EXPECT_GE(d.fourth_moment(), d.variance() * d.variance()) << d.to_string();
}

TEST(Distribution, InvalidParameters) {
  EXPECT_THROW(EntryDistribution::gaussian(0.0), InvalidInput);
  EXPECT_THROW(EntryDistribution::rademacher(-1.0), InvalidInput);
  EXPECT_THROW(EntryDistribution::student_t(4.0, 1.0), InvalidInput);
  EXPECT_THROW(EntryDistribution::parse("cauchy:1"), InvalidInput);
  EXPECT_THROW(EntryDistribution::parse("gaussian:abc"), InvalidInput);
  EXPECT_THROW(EntryDistribution::parse("student-t:3:1"), InvalidInput);
}

TEST(Distribution, ParseSpecStrings) {
  EXPECT_EQ(EntryDistribution::parse("gaussian:1.0").kind(), DistKind::Gaussian);
  const auto t = EntryDistribution::parse("student-t:5:1.0");
  EXPECT_EQ(t.kind(), DistKind::StudentT);
  EXPECT_EQ(t.nu(), 5.0);
  EXPECT_EQ(EntryDistribution::parse("rademacher:1.0").scale(), 1.0);
  EXPECT_EQ(EntryDistribution::parse("uniform:2").kind(), DistKind::UniformSymmetric);
  EXPECT_EQ(EntryDistribution::parse("exponential:1").kind(), DistKind::CenteredExponential);
  for (const auto& d : catalog()) {
    const auto back = EntryDistribution::parse(d.to_string());
    EXPECT_EQ(back.kind(), d.kind());
    EXPECT_EQ(back.scale(), d.scale());
    EXPECT_EQ(back.variance(), d.variance());
  }
}

TEST(Distribution, EmpiricalMomentsMatchCatalog) {
  std::uint64_t seed = 100;
  for (const auto& d : catalog()) {
    const Moments m = empirical(d, 1000000, seed++);
    EXPECT_LE(std::abs(m.m2 - d.variance()), 5.0 * m.se2) << d.to_string();
    // the fourth-moment estimator needs a finite eighth moment, which t(5) lacks
    if (!(d.kind() == DistKind::StudentT && d.nu() <= 8.0)) {
      EXPECT_LE(std::abs(m.m4 - d.fourth_moment()), 5.0 * m.se4) << d.to_string();
    }
  }
}

TEST(Distribution, GaussianPooledEntries) {
  // 10^5 pooled entries from M = 256 matrices
  const auto g = EntryDistribution::gaussian(1.0);
  double s1 = 0, s4 = 0;
  std::size_t n = 0;
  for (std::uint64_t k = 0; n < 100000; ++k) {
    const Matrix e = sample_matrix(g, 256, Seed{77, 0, k});
    for (Eigen::Index i = 0; i < e.size() && n < 100000; ++i, ++n) {
      s1 += e.data()[i];
      s4 += std::pow(e.data()[i], 4);
    }
  }
  EXPECT_LE(std::abs(s1 / 1e5), 4.0 / std::sqrt(1e5));
  EXPECT_NEAR(s4 / 1e5, 3.0, 0.2);
}

TEST(Sampling, DeterministicAndLabelled) {
  const auto d = EntryDistribution::student_t(6.0, 1.0);
  const Matrix a = sample_matrix(d, 9, Seed{1, 2, 3});
  const Matrix b = sample_matrix(d, 9, Seed{1, 2, 3});
  EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(double) * 81), 0);
  EXPECT_NE(a, sample_matrix(d, 9, Seed{1, 2, 4}));
  EXPECT_NE(a, sample_matrix(d, 9, Seed{1, 3, 3}));
  EXPECT_NE(a, sample_matrix(d, 9, Seed{2, 2, 3}));
  EXPECT_THROW(sample_matrix(d, 0, Seed{}), InvalidInput);
}

TEST(Sampling, LeadingBlocksAreNested) {
  for (const auto& d : catalog()) {
    const Matrix small = sample_matrix(d, 5, Seed{3, 0, 0});
    const Matrix big = sample_matrix(d, 12, Seed{3, 0, 0});
    EXPECT_EQ(small, big.topLeftCorner(5, 5)) << d.to_string();
  }
}

TEST(Sampling, Normalization) {
  const auto d = EntryDistribution::gaussian(1.0);
  const Matrix raw = sample_matrix(d, 16, Seed{8, 0, 0});
  const Matrix norm = sample_matrix(d, 16, Seed{8, 0, 0}, Normalization::InvSqrtM);
  EXPECT_EQ(norm, raw / 4.0);
}

TEST(Projection, FullRankIsIdentity) {
  const OrthoProjection p = sample_projection(5, 5, Seed{1, 0, 0});
  EXPECT_LE((p.dense() - Matrix::Identity(5, 5)).norm(), 1e-12);
}

TEST(Projection, HaarMeanInPlane) {
  Matrix mean = Matrix::Zero(2, 2);
  for (std::uint64_t k = 0; k < 10000; ++k) mean += sample_projection(2, 1, Seed{13, 0, k}).dense();
  mean /= 10000.0;
  EXPECT_LE((mean - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Projection, OrthonormalBasis) {
  for (std::uint64_t k = 0; k < 100; ++k) {
    const OrthoProjection p = sample_projection(64, 7, Seed{21, 0, k});
    EXPECT_LE((p.basis().transpose() * p.basis() - Matrix::Identity(7, 7)).norm(), 1e-10);
  }
  EXPECT_THROW(sample_projection(3, 0, Seed{}), InvalidInput);
  EXPECT_THROW(sample_projection(3, 4, Seed{}), InvalidInput);
}

TEST(Projection, RotationInvariantSecondMoment) {
  // E[P] = (r/M) Id for Haar P; checks the sign fix does not bias the law
  Matrix mean = Matrix::Zero(4, 4);
  for (std::uint64_t k = 0; k < 4000; ++k) mean += sample_projection(4, 2, Seed{33, 0, k}).dense();
  mean /= 4000.0;
  EXPECT_LE((mean - 0.5 * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.04);
}
