#include "dproj/localization.hpp"

#include "dproj/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dproj {

void SequenceCondition::validate() const {
  if (!(beta > 1.0)) throw InvalidInput("tail condition: beta must exceed 1");
  if (!(beta_prime > 0.0)) throw InvalidInput("tail condition: beta' must be positive");
  if (!(c > 0.0)) throw InvalidInput("tail condition: c must be positive");
}

SingularInterval singular_interval(double lambda1, double lambda2, double sigma) {
  if (!(lambda2 >= 0.0) || !(sigma >= 0.0)) throw InvalidInput("singular_interval: negative argument");
  if (!(lambda1 > lambda2)) throw InvalidInput("singular_interval: need lambda1 > lambda2");
  const double l1sq = lambda1 * lambda1;
  const double s2 = sigma * sigma;
  return {std::sqrt(l1sq + s2), std::sqrt(l1sq + 4.0 * s2 + 16.0 * s2 * l1sq / (l1sq - lambda2 * lambda2))};
}

std::size_t tail_index_B(std::size_t m, double beta) {
  if (!(beta > 1.0)) throw InvalidInput("tail_index_B: beta must exceed 1");
  if (m < 1) throw InvalidInput("tail_index_B: M must be at least 1");
  const double base = std::pow(static_cast<double>(m), 1.0 / beta) - 1.0;
  // pow(M, 1/beta) can land a hair below an exact integer root
  double root = base;
  const double nearest = std::round(base + 1.0);
  if (std::abs(base + 1.0 - nearest) <= 1e-12 * nearest && std::pow(nearest, beta) == static_cast<double>(m))
    root = nearest - 1.0;
  const double raw = std::floor(std::pow(std::max(root, 0.0), beta));
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

std::vector<TailVerdict> check_tail_condition(std::span<const double> u, const SequenceCondition& cond,
                                              std::vector<std::size_t> grid) {
  cond.validate();
  if (u.empty()) throw InvalidInput("check_tail_condition: empty sequence");
  if (grid.empty())
    for (std::size_t m = 1; m <= u.size(); ++m) grid.push_back(m);
  // rescale so that fast-growing sequences do not overflow when squared
  double top = 0.0;
  for (double x : u) {
    if (!std::isfinite(x)) throw InvalidInput("check_tail_condition: non-finite entry");
    top = std::max(top, std::abs(x));
  }
  if (top == 0.0) throw InvalidInput("check_tail_condition: sequence is identically zero");
  std::vector<double> prefix(u.size() + 1, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) prefix[i + 1] = prefix[i] + (u[i] / top) * (u[i] / top);

  std::vector<TailVerdict> out;
  out.reserve(grid.size());
  for (std::size_t m : grid) {
    if (m < 1 || m > u.size()) throw InvalidInput("check_tail_condition: grid point outside the prefix");
    if (prefix[m] == 0.0)
      throw InvalidInput("check_tail_condition: prefix of length " + std::to_string(m) + " is all zero");
    TailVerdict v{};
    v.m = m;
    v.b = std::min(tail_index_B(m, cond.beta), m);
    double tail = 0.0;
    for (std::size_t i = v.b; i <= m; ++i) tail += (u[i - 1] / top) * (u[i - 1] / top);
    v.ratio = tail / prefix[m];
    v.threshold = cond.c * std::pow(static_cast<double>(m), -cond.beta_prime);
    v.holds = v.ratio <= v.threshold;
    out.push_back(v);
  }
  return out;
}

double covariance_quadratic_form(std::span<const double> u, const Matrix& e_norm) {
  require_square(e_norm, "covariance_quadratic_form");
  require_finite(e_norm, "covariance_quadratic_form");
  if (u.size() != static_cast<std::size_t>(e_norm.rows()))
    throw InvalidInput("covariance_quadratic_form: sequence length differs from M");
  const Vector uv = Eigen::Map<const Vector>(u.data(), static_cast<Eigen::Index>(u.size()));
  const double norm = uv.norm();
  if (!(norm > 0.0)) throw InvalidInput("covariance_quadratic_form: u is zero");
  return (e_norm.transpose() * (uv / norm)).squaredNorm();
}

std::vector<TrajectoryPoint> slln_trajectory(const SequenceRule& rule, const EntryDistribution& dist,
                                             const std::vector<std::size_t>& grid, const Seed& seed) {
  if (grid.empty()) throw InvalidInput("slln_trajectory: empty grid");
  for (std::size_t g = 0; g < grid.size(); ++g)
    if (grid[g] < 1 || (g > 0 && grid[g] <= grid[g - 1]))
      throw InvalidInput("slln_trajectory: grid must be strictly increasing and positive");
  const std::size_t mmax = grid.back();
  const std::vector<double> u = rule.prefix(mmax);

  // acc[g][k] = sum_{i < M_g} u_i E_ik  (raw entries)
  std::vector<std::vector<double>> acc(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) acc[g].assign(grid[g], 0.0);
  std::vector<double> row(mmax);
  for (std::size_t i = 0; i < mmax; ++i) {
    if (u[i] == 0.0) continue;
    sample_row(dist, seed, i, row);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (i >= grid[g]) continue;
      double* a = acc[g].data();
      for (std::size_t k = 0; k < grid[g]; ++k) a[k] += u[i] * row[k];
    }
  }

  std::vector<TrajectoryPoint> out;
  out.reserve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const std::size_t m = grid[g];
    double usq = 0.0;
    for (std::size_t i = 0; i < m; ++i) usq += u[i] * u[i];
    if (usq == 0.0) throw InvalidInput("slln_trajectory: sequence prefix of length " + std::to_string(m) + " is all zero");
    double s = 0.0;
    for (double a : acc[g]) s += a * a;
    out.push_back({m, s / (usq * static_cast<double>(m))});
  }
  return out;
}

double cross_term(const SequenceRule& u, const SequenceRule& v, const EntryDistribution& dist, std::size_t m,
                  const Seed& seed) {
  if (m < 1) throw InvalidInput("cross_term: M must be at least 1");
  const std::vector<double> uu = u.prefix(m);
  const std::vector<double> vv = v.prefix(m);
  double un = 0.0, vn = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    un += uu[i] * uu[i];
    vn += vv[i] * vv[i];
  }
  if (un == 0.0 || vn == 0.0) throw InvalidInput("cross_term: zero sequence prefix");
  std::vector<double> row(m);
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (uu[j] == 0.0) continue;
    sample_row(dist, seed, j, row);
    double inner = 0.0;
    for (std::size_t i = 0; i < m; ++i) inner += row[i] * vv[i];
    s += uu[j] * inner;
  }
  return s / std::sqrt(un * vn * static_cast<double>(m));
}

double spiked_top_singular(const Matrix& c, const EntryDistribution& dist, const Seed& seed) {
  require_square(c, "spiked_top_singular");
  const Matrix x = c + sample_matrix(dist, static_cast<std::size_t>(c.rows()), seed, Normalization::InvSqrtM);
  return std::sqrt(gram_eigenvalues(x).front());
}

void RankSelectionConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("rank selection: alpha must lie in (0, 1]");
  if (!(sigma_sq >= 0.0) || !std::isfinite(sigma_sq)) throw InvalidInput("rank selection: sigma^2 must be >= 0");
}

namespace {

// Smallest r >= 1 with energy[r-1] / total >= alpha, within 1e-12.
std::size_t first_reaching(const std::vector<double>& energy, double total, double alpha) {
  for (std::size_t r = 1; r <= energy.size(); ++r)
    if (energy[r - 1] / total >= alpha - 1e-12) return r;
  return energy.size();
}

std::vector<double> cumulative_squares(const std::vector<double>& values) {
  std::vector<double> out(values.size());
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s += values[i] * values[i];
    out[i] = s;
  }
  return out;
}

}  // namespace

std::size_t rank_select(const SingularSpectrum& spectrum, const RankSelectionConfig& cfg) {
  cfg.validate();
  const std::vector<double> energy = cumulative_squares(spectrum.values());
  if (energy.empty() || energy.back() == 0.0) throw InvalidInput("rank_select: spectrum is all zero");
  return first_reaching(energy, energy.back(), cfg.alpha);
}

std::optional<std::size_t> empirical_rank_select(const SingularSpectrum& spectrum, std::size_t m,
                                                 const RankSelectionConfig& cfg) {
  cfg.validate();
  if (spectrum.size() == 0) throw InvalidInput("empirical_rank_select: empty spectrum");
  const double edge = 2.0 * std::sqrt(cfg.sigma_sq * static_cast<double>(m));
  std::size_t cap = 0;
  for (double v : spectrum.values())
    if (v > edge) ++cap;
  if (cap == 0) return std::nullopt;
  std::vector<double> energy = cumulative_squares(spectrum.values());
  energy.resize(cap);
  double running = 0.0;
  for (std::size_t r = 1; r <= cap; ++r) {
    const double corrected = std::max(0.0, energy[r - 1] - cfg.sigma_sq * static_cast<double>(r * m));
    running = std::max(running, corrected);
    energy[r - 1] = running;
  }
  if (!(energy.back() > 0.0)) return std::nullopt;
  return first_reaching(energy, energy.back(), cfg.alpha);
}

std::optional<std::size_t> empirical_rank_select(const Matrix& x, const RankSelectionConfig& cfg) {
  require_square(x, "empirical_rank_select");
  return empirical_rank_select(singular_values(x), static_cast<std::size_t>(x.rows()), cfg);
}

}  // namespace dproj
