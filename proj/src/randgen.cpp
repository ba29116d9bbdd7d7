#include "dproj/randgen.hpp"

#include "dproj/errors.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

namespace dproj {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double parse_number(std::string_view text, std::string_view spec) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidInput("distribution spec '" + std::string(spec) + "': bad number '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  for (;;) {
    const auto p = s.find(sep);
    parts.push_back(s.substr(0, p));
    if (p == std::string_view::npos) break;
    s.remove_prefix(p + 1);
  }
  return parts;
}

}  // namespace

EntryDistribution::EntryDistribution(DistKind kind, double scale, double nu) : kind_(kind), scale_(scale), nu_(nu) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidInput("distribution scale must be positive and finite");
  if (kind == DistKind::StudentT && !(nu > 4.0))
    throw InvalidInput("student-t needs nu > 4 for a finite fourth moment");
}

EntryDistribution EntryDistribution::gaussian(double scale) { return {DistKind::Gaussian, scale, 0.0}; }
EntryDistribution EntryDistribution::rademacher(double scale) { return {DistKind::Rademacher, scale, 0.0}; }
EntryDistribution EntryDistribution::uniform_symmetric(double a) { return {DistKind::UniformSymmetric, a, 0.0}; }
EntryDistribution EntryDistribution::centered_exponential(double scale) {
  return {DistKind::CenteredExponential, scale, 0.0};
}
EntryDistribution EntryDistribution::student_t(double nu, double scale) { return {DistKind::StudentT, scale, nu}; }

EntryDistribution EntryDistribution::parse(std::string_view spec) {
  const auto parts = split(spec, ':');
  const std::string_view kind = parts[0];
  const auto one_param = [&]() {
    if (parts.size() == 1) return 1.0;
    if (parts.size() != 2) throw InvalidInput("distribution spec '" + std::string(spec) + "': expected kind:scale");
    return parse_number(parts[1], spec);
  };
  if (kind == "gaussian" || kind == "normal") return gaussian(one_param());
  if (kind == "rademacher") return rademacher(one_param());
  if (kind == "uniform" || kind == "uniform-symmetric") return uniform_symmetric(one_param());
  if (kind == "exponential" || kind == "centered-exponential") return centered_exponential(one_param());
  if (kind == "student-t" || kind == "t") {
    if (parts.size() < 2 || parts.size() > 3)
      throw InvalidInput("distribution spec '" + std::string(spec) + "': expected student-t:nu[:scale]");
    const double nu = parse_number(parts[1], spec);
    const double scale = parts.size() == 3 ? parse_number(parts[2], spec) : 1.0;
    return student_t(nu, scale);
  }
  throw InvalidInput("unknown distribution kind '" + std::string(kind) + "'");
}

std::string EntryDistribution::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case DistKind::Gaussian: os << "gaussian:" << scale_; break;
    case DistKind::Rademacher: os << "rademacher:" << scale_; break;
    case DistKind::UniformSymmetric: os << "uniform-symmetric:" << scale_; break;
    case DistKind::CenteredExponential: os << "centered-exponential:" << scale_; break;
    case DistKind::StudentT: os << "student-t:" << nu_ << ':' << scale_; break;
  }
  return os.str();
}

double EntryDistribution::variance() const noexcept {
  const double s2 = scale_ * scale_;
  return kind_ == DistKind::UniformSymmetric ? s2 / 3.0 : s2;
}

double EntryDistribution::fourth_moment() const noexcept {
  const double s4 = scale_ * scale_ * scale_ * scale_;
  switch (kind_) {
    case DistKind::Gaussian: return 3.0 * s4;
    case DistKind::Rademacher: return s4;
    case DistKind::UniformSymmetric: return s4 / 5.0;
    case DistKind::CenteredExponential: return 9.0 * s4;
    case DistKind::StudentT: return 3.0 * (nu_ - 2.0) / (nu_ - 4.0) * s4;
  }
  return 0.0;
}

double EntryDistribution::draw(std::mt19937_64& engine) const {
  switch (kind_) {
    case DistKind::Gaussian: return scale_ * std::normal_distribution<double>()(engine);
    case DistKind::Rademacher: return (engine() >> 63) ? scale_ : -scale_;
    case DistKind::UniformSymmetric: return std::uniform_real_distribution<double>(-scale_, scale_)(engine);
    case DistKind::CenteredExponential: return scale_ * (std::exponential_distribution<double>(1.0)(engine) - 1.0);
    case DistKind::StudentT:
      return scale_ * std::sqrt((nu_ - 2.0) / nu_) * std::student_t_distribution<double>(nu_)(engine);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

std::uint64_t stream_key(const Seed& seed, StreamDomain domain, std::uint64_t index) {
  std::uint64_t h = splitmix(seed.experiment);
  h = splitmix(h ^ seed.replication);
  h = splitmix(h ^ static_cast<std::uint64_t>(domain));
  h = splitmix(h ^ index);
  return splitmix(seed.root ^ h);
}

std::mt19937_64 make_engine(const Seed& seed, StreamDomain domain, std::uint64_t index) {
  return std::mt19937_64(stream_key(seed, domain, index));
}

void sample_row(const EntryDistribution& dist, const Seed& seed, std::size_t row, std::span<double> out) {
  auto engine = make_engine(seed, StreamDomain::MatrixRow, row);
  if (dist.kind() == DistKind::Gaussian) {
    // one distribution object per row keeps the cached second Box-Muller
    // variate inside the row
    std::normal_distribution<double> normal;
    for (double& v : out) v = dist.scale() * normal(engine);
    return;
  }
  for (double& v : out) v = dist.draw(engine);
}

Matrix sample_matrix(const EntryDistribution& dist, std::size_t m, const Seed& seed, Normalization norm) {
  if (m < 1) throw InvalidInput("sample_matrix: M must be at least 1");
  const auto n = static_cast<Eigen::Index>(m);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    sample_row(dist, seed, static_cast<std::size_t>(i), std::span<double>(rows.row(i).data(), m));
  Matrix out = rows;
  if (norm == Normalization::InvSqrtM) out /= std::sqrt(static_cast<double>(m));
  return out;
}

OrthoProjection sample_projection(std::size_t m, std::size_t r, const Seed& seed) {
  if (r < 1 || r > m) throw InvalidInput("sample_projection: need 1 <= r <= M");
  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(r);
  auto engine = make_engine(seed, StreamDomain::Projection);
  std::normal_distribution<double> normal;
  Matrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = normal(engine);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < cols; ++j)
    if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
  return make_trusted_projection(std::move(q));
}

}  // namespace dproj
