#pragma once

// Reproducible Monte Carlo estimation over independent noise draws.
//
// Replication k of an experiment draws its noise from the stream labelled
// (experiment, k) under the root seed, and results are aggregated in
// replication order with compensated summation, so estimates are bitwise
// identical for any number of workers.

#include "dproj/bounds.hpp"
#include "dproj/linalg.hpp"
#include "dproj/randgen.hpp"
#include "dproj/sequence.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dproj {

// Deterministic signal matrix description:
//   "zero"                      C = 0
//   "diag:2,1,0,0"              diagonal, zero-padded up to M
//   "ladder:top=8,count=4"      diag(top, top*(count-1)/count, ..., top/count, 0, ...)
//   "equal:lambda=2"            lambda * Id
//   "rank1:lambda=3[,u=RULE]"   lambda * u u^T / ||u||^2, RULE as in SequenceRule (default finite:1)
//   "file:path"                 CSV or raw binary matrix
class SignalSpec {
 public:
  enum class Kind { Zero, Diag, Ladder, Equal, RankOne, File };

  static SignalSpec parse(std::string_view text);
  const std::string& text() const noexcept { return text_; }
  Kind kind() const noexcept { return kind_; }

  Matrix build(std::size_t m) const;
  // Dimension fixed by the spec itself (file), if any.
  std::optional<std::size_t> natural_dim() const;

 private:
  Kind kind_ = Kind::Zero;
  std::string text_ = "zero";
  std::vector<double> values_;
  double lambda_ = 0.0;
  std::size_t count_ = 0;
  std::optional<SequenceRule> rule_;
  std::optional<Matrix> file_matrix_;
};

struct ExperimentConfig {
  std::size_t m = 0;
  std::size_t r = 1;
  SignalSpec signal = SignalSpec::parse("zero");
  EntryDistribution dist = EntryDistribution::gaussian(1.0);
  std::size_t reps = 200;
  Seed seed{};
  Normalization normalization = Normalization::None;

  void validate() const;
  // Variance and fourth moment of the entries after normalization.
  double entry_variance() const;
  double entry_fourth_moment() const;
};

enum class Statistic { ZSup, Z1Sup, Z2Sup, Sigma1, Sigma1Sq, UnbiasedEnergy };
Statistic parse_statistic(std::string_view name);
std::string_view to_string(Statistic s);

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  std::size_t n = 0;
  double min = 0.0;
  double max = 0.0;
};

// Aggregates in the given order with Neumaier summation.
MCEstimate summarize(const std::vector<double>& samples);

struct EstimateOptions {
  std::size_t workers = 1;
  // For the Z statistics, check z1_sup <= Y (1 + 1e-8) and
  // z_sup <= z1_sup + z2_sup in every replication; a violation aborts.
  bool pathwise_check = true;
};

// Per-replication values of `stat`, in replication order.
std::vector<double> replicate(const ExperimentConfig& config, Statistic stat, const EstimateOptions& opts = {});
MCEstimate estimate(const ExperimentConfig& config, Statistic stat, const EstimateOptions& opts = {});

struct RatioRow {
  ExperimentConfig config;
  MCEstimate z_sup;
  double thm3_value;
  double ratio;  // z_sup.mean / thm3_value
};

struct RatioTable {
  std::vector<RatioRow> rows;  // sorted by M, then r
  double max_ratio = 0.0;
};

RatioTable ratio_report(const std::vector<ExperimentConfig>& grid, const EstimateOptions& opts = {});

}  // namespace dproj
