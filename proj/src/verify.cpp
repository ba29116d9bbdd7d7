#include "dproj/verify.hpp"

#include "dproj/bounds.hpp"
#include "dproj/errors.hpp"
#include "dproj/zprocess.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dproj {

namespace {

// experiment labels; each role in each suite gets its own stream family
enum Label : std::uint64_t {
  kProp1Signal = 101,
  kProp1Noise = 102,
  kLemma1A = 201,
  kLemma1B = 202,
  kLemma1P1 = 203,
  kLemma1P2 = 204,
  kLemma2Signal = 301,
  kLemma2Proj = 302,
  kDecompSignal = 401,
  kDecompNoise = 402,
  kDecompProj = 403,
};

constexpr std::size_t kMaxReproducers = 20;

Seed label(std::uint64_t root, Label l, std::uint64_t trial) { return Seed{root, l, trial}; }

Matrix draw_signal(const VerifyConfig& cfg, Label l, std::size_t trial) {
  if (cfg.signal) return cfg.signal->build(cfg.m);
  return sample_matrix(EntryDistribution::gaussian(1.0), cfg.m, label(cfg.seed, l, trial));
}

std::string repro(const char* suite, const VerifyConfig& cfg, std::size_t trial, std::size_t sub = 0) {
  std::ostringstream os;
  os << "suite=" << suite << " M=" << cfg.m << " r=" << cfg.r << " dist=" << cfg.dist.to_string()
     << " C=" << (cfg.signal ? cfg.signal->text() : std::string("random-gaussian")) << " seed=" << cfg.seed
     << " trial=" << trial << " projection=" << sub;
  return os.str();
}

}  // namespace

void SuiteResult::record(double lhs, double rhs, double slack, double scale, const std::string& reproducer) {
  ++checks;
  const double margin = (rhs + slack - lhs) / std::max(scale, 1e-300);
  worst_margin = std::min(worst_margin, margin);
  if (!(lhs <= rhs + slack)) {
    ++violations;
    if (reproducers.size() < kMaxReproducers) reproducers.push_back(reproducer);
  }
}

void VerifyConfig::validate() const {
  if (m < 2 || r < 1 || r >= m) throw InvalidInput("verify: need 1 <= r < M");
  if (trials < 1) throw InvalidInput("verify: need at least one trial");
  if (projections_per_trial < 1) throw InvalidInput("verify: need at least one projection per trial");
}

SuiteResult verify_prop1(const VerifyConfig& cfg) {
  cfg.validate();
  SuiteResult out;
  out.name = "prop1";
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const ExcessProcess proc(draw_signal(cfg, kProp1Signal, t), cfg.r);
    const Matrix e = sample_matrix(cfg.dist, cfg.m, label(cfg.seed, kProp1Noise, t));
    const auto sv = proc.sup_values(e);
    const double y = prop1_Y(proc.signal_spectrum(), cfg.m, cfg.r, sv.sigma1).y;
    out.record(sv.z1, y, std::isfinite(y) ? 1e-8 * y : 0.0, 1.0 + sv.scale, repro("prop1", cfg, t));
  }
  return out;
}

SuiteResult verify_lemma1(const VerifyConfig& cfg) {
  cfg.validate();
  SuiteResult out;
  out.name = "lemma1";
  const auto gauss = EntryDistribution::gaussian(1.0);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const Matrix a = sample_matrix(gauss, cfg.m, label(cfg.seed, kLemma1A, t));
    const Matrix b = sample_matrix(gauss, cfg.m, label(cfg.seed, kLemma1B, t));
    const OrthoProjection p1 = sample_projection(cfg.m, cfg.r, label(cfg.seed, kLemma1P1, t));
    const OrthoProjection p2 = sample_projection(cfg.m, cfg.r, label(cfg.seed, kLemma1P2, t));
    const double lhs = trace_form(a, p2, p1, b);
    const double rhs = lemma1_rhs(a, b, p1, p2);
    const double scale = 1.0 + a.norm() * b.norm();
    out.record(lhs, rhs, 1e-9 * scale, scale, repro("lemma1", cfg, t));
  }
  return out;
}

SuiteResult verify_lemma2(const VerifyConfig& cfg) {
  cfg.validate();
  SuiteResult out;
  out.name = "lemma2";
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const Matrix c = draw_signal(cfg, kLemma2Signal, t);
    const SvdResult dec = svd(c);
    const OrthoProjection oracle = top_left_projection(dec, cfg.r);
    const double best = oracle.captured_energy(c);
    const double scale = 1.0 + c.squaredNorm();
    for (std::size_t k = 0; k < cfg.projections_per_trial; ++k) {
      const OrthoProjection p = sample_projection(cfg.m, cfg.r, label(cfg.seed, kLemma2Proj, t * cfg.projections_per_trial + k));
      const double drift = p.captured_energy(c) - best;
      const double d = proj_diff_norms(p, oracle).s2;
      const DriftBound bound = lemma2_rhs(dec.spectrum, cfg.r, d);
      const std::string where = repro("lemma2", cfg, t, k);
      out.record(drift, bound.rhs_i, 1e-9 * scale, scale, where + " part=i");
      if (bound.gate_ii) out.record(drift, bound.rhs_ii, 1e-9 * scale, scale, where + " part=ii");
    }
  }
  return out;
}

SuiteResult verify_decomposition(const VerifyConfig& cfg) {
  cfg.validate();
  SuiteResult out;
  out.name = "decomposition";
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const ExcessProcess proc(draw_signal(cfg, kDecompSignal, t), cfg.r);
    const Matrix e = sample_matrix(cfg.dist, cfg.m, label(cfg.seed, kDecompNoise, t));
    const SupResult zs = proc.sup(e);
    const SupResult z1s = proc.sup_signal(e);
    const SupResult z2s = proc.sup_noise(e);
    const double scale = 1.0 + (proc.signal() + e).squaredNorm() + proc.signal().squaredNorm();
    const double tau = 1e-9 * scale;
    const std::string where = repro("decomposition", cfg, t);
    out.record(zs.value, z1s.value + z2s.value, tau, scale, where + " check=subadditive");
    for (const double v : {zs.value, z1s.value, z2s.value}) out.record(0.0, v, tau, scale, where + " check=nonnegative");
    for (std::size_t k = 0; k < cfg.projections_per_trial; ++k) {
      const OrthoProjection p = sample_projection(cfg.m, cfg.r, label(cfg.seed, kDecompProj, t * cfg.projections_per_trial + k));
      const ZDecomposition at = proc.at(e, p);
      const std::string w = repro("decomposition", cfg, t, k);
      const double gap = std::abs(at.z - at.z1 - at.z2);
      out.record(gap, 0.0, 1e-9 * (1.0 + std::abs(at.z)), 1.0 + std::abs(at.z), w + " check=z=z1+z2");
      out.record(at.z, zs.value, tau, scale, w + " check=sup-z");
      out.record(at.z1, z1s.value, tau, scale, w + " check=sup-z1");
      out.record(at.z2, z2s.value, tau, scale, w + " check=sup-z2");
    }
  }
  return out;
}

SuiteResult verify_sandwich(std::size_t m_max) {
  SuiteResult out;
  out.name = "sandwich";
  for (std::size_t m = 2; m <= m_max; ++m)
    for (std::size_t r = 1; r < m; ++r) {
      const double lower = static_cast<double>(r * (m - r));
      const double mid = static_cast<double>(effective_rank(r, m) * m);
      const std::string where = "suite=sandwich M=" + std::to_string(m) + " r=" + std::to_string(r);
      out.record(lower, mid, 0.0, lower, where + " side=lower");
      out.record(mid, 2.0 * lower, 0.0, lower, where + " side=upper");
    }
  return out;
}

std::vector<SuiteResult> verify_all(const VerifyConfig& cfg) {
  return {verify_prop1(cfg), verify_lemma1(cfg), verify_lemma2(cfg), verify_decomposition(cfg),
          verify_sandwich(cfg.m)};
}

}  // namespace dproj
