#include "dproj/montecarlo.hpp"

#include "dproj/errors.hpp"
#include "dproj/matrix_io.hpp"
#include "dproj/zprocess.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace dproj {

namespace {

double parse_double(std::string_view text, std::string_view context) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw InvalidInput("signal spec '" + std::string(context) + "': bad number '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto p = s.find(',');
    out.push_back(s.substr(0, p));
    if (p == std::string_view::npos) break;
    s.remove_prefix(p + 1);
  }
  return out;
}

// key=value pairs separated by commas
std::vector<std::pair<std::string_view, std::string_view>> parse_keys(std::string_view body, std::string_view ctx) {
  std::vector<std::pair<std::string_view, std::string_view>> out;
  for (std::string_view item : split_commas(body)) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidInput("signal spec '" + std::string(ctx) + "': expected key=value");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

std::size_t parse_count(std::string_view text, std::string_view ctx) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidInput("signal spec '" + std::string(ctx) + "': bad count '" + std::string(text) + "'");
  return v;
}

struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::string reproducer(const ExperimentConfig& c, std::size_t k) {
  std::ostringstream os;
  os << "M=" << c.m << " r=" << c.r << " C=" << c.signal.text() << " dist=" << c.dist.to_string()
     << " seed=" << c.seed.root << " experiment=" << c.seed.experiment << " replication=" << k;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

SignalSpec SignalSpec::parse(std::string_view text) {
  SignalSpec s;
  s.text_ = std::string(text);
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  if (head == "zero") {
    if (!body.empty()) throw InvalidInput("signal spec 'zero' takes no parameters");
    s.kind_ = Kind::Zero;
  } else if (head == "diag") {
    s.kind_ = Kind::Diag;
    for (std::string_view v : split_commas(body)) s.values_.push_back(parse_double(v, text));
  } else if (head == "ladder") {
    s.kind_ = Kind::Ladder;
    for (auto [k, v] : parse_keys(body, text)) {
      if (k == "top") s.lambda_ = parse_double(v, text);
      else if (k == "count") s.count_ = parse_count(v, text);
      else throw InvalidInput("signal spec '" + std::string(text) + "': unknown key '" + std::string(k) + "'");
    }
    if (s.count_ < 1) throw InvalidInput("ladder needs count >= 1");
  } else if (head == "equal") {
    s.kind_ = Kind::Equal;
    for (auto [k, v] : parse_keys(body, text)) {
      if (k == "lambda") s.lambda_ = parse_double(v, text);
      else throw InvalidInput("signal spec '" + std::string(text) + "': unknown key '" + std::string(k) + "'");
    }
  } else if (head == "rank1") {
    s.kind_ = Kind::RankOne;
    // u=RULE may itself contain ':' (finite:k); keys are split on ',' only
    for (auto [k, v] : parse_keys(body, text)) {
      if (k == "lambda") s.lambda_ = parse_double(v, text);
      else if (k == "u") s.rule_ = SequenceRule::parse(v);
      else throw InvalidInput("signal spec '" + std::string(text) + "': unknown key '" + std::string(k) + "'");
    }
    if (!s.rule_) s.rule_ = SequenceRule::finite_support(1);
  } else if (head == "file") {
    s.kind_ = Kind::File;
    s.file_matrix_ = io::read_matrix(std::string(body));
    require_square(*s.file_matrix_, "signal file");
  } else {
    throw InvalidInput("unknown signal spec '" + std::string(text) + "'");
  }
  if ((s.kind_ == Kind::Ladder || s.kind_ == Kind::Equal || s.kind_ == Kind::RankOne) && s.lambda_ < 0.0)
    throw InvalidInput("signal spec '" + std::string(text) + "': amplitude must be nonnegative");
  return s;
}

std::optional<std::size_t> SignalSpec::natural_dim() const {
  if (kind_ == Kind::File) return static_cast<std::size_t>(file_matrix_->rows());
  if (kind_ == Kind::Diag) return values_.size();
  return std::nullopt;
}

Matrix SignalSpec::build(std::size_t m) const {
  if (m < 1) throw InvalidInput("signal dimension must be at least 1");
  const auto n = static_cast<Eigen::Index>(m);
  Matrix c = Matrix::Zero(n, n);
  switch (kind_) {
    case Kind::Zero: break;
    case Kind::Diag:
      if (values_.size() > m) throw InvalidInput("signal spec '" + text_ + "' has more than M diagonal entries");
      for (std::size_t i = 0; i < values_.size(); ++i) c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values_[i];
      break;
    case Kind::Ladder:
      if (count_ > m) throw InvalidInput("signal spec '" + text_ + "': count exceeds M");
      for (std::size_t i = 0; i < count_; ++i)
        c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            lambda_ * static_cast<double>(count_ - i) / static_cast<double>(count_);
      break;
    case Kind::Equal: c.diagonal().setConstant(lambda_); break;
    case Kind::RankOne: {
      const std::vector<double> u = rule_->prefix(m);
      const Vector uv = Eigen::Map<const Vector>(u.data(), n);
      const double norm = uv.norm();
      if (norm == 0.0) throw InvalidInput("signal spec '" + text_ + "': sequence prefix is all zero");
      c = lambda_ * (uv / norm) * (uv / norm).transpose();
      break;
    }
    case Kind::File:
      if (static_cast<std::size_t>(file_matrix_->rows()) != m)
        throw InvalidInput("signal file is " + std::to_string(file_matrix_->rows()) + "x" +
                           std::to_string(file_matrix_->cols()) + ", expected M=" + std::to_string(m));
      c = *file_matrix_;
      break;
  }
  return c;
}

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (m < 2 || r < 1 || r >= m) throw InvalidInput("experiment config: need 1 <= r < M");
  if (reps < 2) throw InvalidInput("experiment config: need reps >= 2");
}

double ExperimentConfig::entry_variance() const {
  const double v = dist.variance();
  return normalization == Normalization::InvSqrtM ? v / static_cast<double>(m) : v;
}

double ExperimentConfig::entry_fourth_moment() const {
  const double q = dist.fourth_moment();
  const double md = static_cast<double>(m);
  return normalization == Normalization::InvSqrtM ? q / (md * md) : q;
}

Statistic parse_statistic(std::string_view name) {
  if (name == "z_sup") return Statistic::ZSup;
  if (name == "z1_sup") return Statistic::Z1Sup;
  if (name == "z2_sup") return Statistic::Z2Sup;
  if (name == "sigma1") return Statistic::Sigma1;
  if (name == "sigma1_sq") return Statistic::Sigma1Sq;
  if (name == "unbiased_energy") return Statistic::UnbiasedEnergy;
  throw InvalidInput("unknown statistic '" + std::string(name) + "'");
}

std::string_view to_string(Statistic s) {
  switch (s) {
    case Statistic::ZSup: return "z_sup";
    case Statistic::Z1Sup: return "z1_sup";
    case Statistic::Z2Sup: return "z2_sup";
    case Statistic::Sigma1: return "sigma1";
    case Statistic::Sigma1Sq: return "sigma1_sq";
    case Statistic::UnbiasedEnergy: return "unbiased_energy";
  }
  return "unknown";
}

MCEstimate summarize(const std::vector<double>& samples) {
  MCEstimate est;
  est.n = samples.size();
  if (samples.empty()) return est;
  NeumaierSum sum;
  for (double x : samples) sum.add(x);
  est.mean = sum.value() / static_cast<double>(samples.size());
  NeumaierSum sq;
  for (double x : samples) sq.add((x - est.mean) * (x - est.mean));
  if (samples.size() > 1) {
    const double var = sq.value() / static_cast<double>(samples.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(samples.size()));
  }
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  est.min = *lo;
  est.max = *hi;
  return est;
}

std::vector<double> replicate(const ExperimentConfig& config, Statistic stat, const EstimateOptions& opts) {
  config.validate();
  const bool needs_process = stat == Statistic::ZSup || stat == Statistic::Z1Sup || stat == Statistic::Z2Sup ||
                             stat == Statistic::UnbiasedEnergy;
  std::optional<ExcessProcess> process;
  if (needs_process) process.emplace(config.signal.build(config.m), config.r);

  std::vector<double> out(config.reps, 0.0);
  std::vector<std::exception_ptr> failures(config.reps);
  const double noise_energy = config.entry_variance() * static_cast<double>(config.r) * static_cast<double>(config.m);

  parallel_for(config.reps, opts.workers, [&](std::size_t k) {
    try {
      const Matrix e = sample_matrix(config.dist, config.m, config.seed.with_replication(k), config.normalization);
      double value = 0.0;
      switch (stat) {
        case Statistic::ZSup:
        case Statistic::Z1Sup:
        case Statistic::Z2Sup: {
          const auto sv = process->sup_values(e);
          if (!std::isfinite(sv.z) || !std::isfinite(sv.z1) || !std::isfinite(sv.z2))
            throw NumericalFailure("non-finite supremum");
          if (opts.pathwise_check) {
            const SignalSupBound y = prop1_Y(process->signal_spectrum(), config.m, config.r, sv.sigma1);
            if (sv.z1 > y.y * (1.0 + 1e-8))
              throw NumericalFailure("pathwise violation z1_sup > Y (" + std::to_string(sv.z1) + " > " +
                                     std::to_string(y.y) + ")");
            if (sv.z > sv.z1 + sv.z2 + 1e-9 * (1.0 + sv.scale))
              throw NumericalFailure("pathwise violation z_sup > z1_sup + z2_sup");
          }
          value = stat == Statistic::ZSup ? sv.z : (stat == Statistic::Z1Sup ? sv.z1 : sv.z2);
          break;
        }
        case Statistic::Sigma1:
        case Statistic::Sigma1Sq: {
          const double top = gram_eigenvalues(e).front();
          value = stat == Statistic::Sigma1 ? std::sqrt(top) : top;
          break;
        }
        case Statistic::UnbiasedEnergy: value = process->oracle_energy(e) - noise_energy; break;
      }
      out[k] = value;
    } catch (const std::exception& ex) {
      failures[k] = std::make_exception_ptr(ReplicationFailure(k, std::string(ex.what()) + " [" + reproducer(config, k) + "]"));
    }
  });
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return out;
}

MCEstimate estimate(const ExperimentConfig& config, Statistic stat, const EstimateOptions& opts) {
  return summarize(replicate(config, stat, opts));
}

RatioTable ratio_report(const std::vector<ExperimentConfig>& grid, const EstimateOptions& opts) {
  if (grid.empty()) throw InvalidInput("ratio_report: empty grid");
  RatioTable table;
  table.rows.reserve(grid.size());
  for (const ExperimentConfig& cfg : grid) {
    cfg.validate();
    const SingularSpectrum spec = singular_values(cfg.signal.build(cfg.m));
    const UniversalBound bound = thm3_bound(spec, cfg.m, cfg.r, cfg.entry_variance(), cfg.entry_fourth_moment());
    RatioRow row{cfg, estimate(cfg, Statistic::ZSup, opts), bound.value, 0.0};
    row.ratio = row.z_sup.mean / row.thm3_value;
    table.rows.push_back(std::move(row));
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const RatioRow& a, const RatioRow& b) {
    return a.config.m != b.config.m ? a.config.m < b.config.m : a.config.r < b.config.r;
  });
  for (const RatioRow& row : table.rows) table.max_ratio = std::max(table.max_ratio, row.ratio);
  return table;
}

}  // namespace dproj
