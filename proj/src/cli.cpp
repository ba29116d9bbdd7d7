#include "dproj/cli.hpp"

#include "dproj/bounds.hpp"
#include "dproj/errors.hpp"
#include "dproj/localization.hpp"
#include "dproj/matrix_io.hpp"
#include "dproj/montecarlo.hpp"
#include "dproj/report.hpp"
#include "dproj/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace dproj::cli {

namespace {

using report::Json;

struct Output {
  std::string path;
  std::string format = "json";
};

void add_output(CLI::App* sub, Output& o) {
  sub->add_option("--out", o.path, "Report file (default: stdout)");
  sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

// Writes either the JSON document or the CSV produced by `csv`.
void emit(const Output& o, std::ostream& out, const Json& doc, const std::function<void(std::ostream&)>& csv) {
  std::ostringstream buf;
  if (o.format == "csv")
    csv(buf);
  else
    buf << doc.dump(2) << '\n';
  if (o.path.empty()) {
    out << buf.str();
    return;
  }
  std::ofstream f(o.path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + o.path);
  f << buf.str();
}

std::vector<std::size_t> resolve_ranks(const std::vector<std::string>& spec, std::size_t m) {
  std::vector<std::size_t> out;
  auto push = [&](std::size_t r) {
    if (r >= 1 && r < m && std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  };
  for (const std::string& s : spec) {
    if (s == "auto") {
      push(1);
      push(m / 4);
      push(m / 2);
      push(m - 1);
      continue;
    }
    std::size_t r = 0;
    try {
      r = std::stoul(s);
    } catch (const std::exception&) {
      throw InvalidInput("bad rank '" + s + "'");
    }
    if (r < 1 || r >= m) throw InvalidInput("rank " + s + " outside 1 <= r < M=" + std::to_string(m));
    push(r);
  }
  return out;
}

Json run_manifest(const std::string& command, const Json& config, std::uint64_t seed, const std::string& started,
                  report::Outcome outcome, std::vector<std::string> reproducers = {}) {
  report::RunManifest m;
  m.command = command;
  m.config = config;
  m.seed_root = seed;
  m.started = started;
  m.finished = report::utc_now();
  m.outcome = outcome;
  m.reproducers = std::move(reproducers);
  return report::to_json(m);
}

}  // namespace

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Projections of deformed random matrices: suprema, bounds and Monte Carlo checks", "dproj"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(report::kVersion));

  const std::string started = report::utc_now();
  int status = 0;
  Json failure_config = Json::object();
  std::string failure_command;
  std::uint64_t failure_seed = 0;

  // simulate ----------------------------------------------------------------
  struct {
    std::size_t m = 0, r = 1, reps = 200, workers = 1;
    std::string dist = "gaussian:1.0", c = "zero";
    std::uint64_t seed = 1;
    std::vector<std::string> stats{"z_sup", "z1_sup", "z2_sup", "sigma1", "sigma1_sq", "unbiased_energy"};
    Output o;
  } sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimates and every bound for one configuration");
  simulate->add_option("--M", sim.m, "Dimension (default: implied by --C)");
  simulate->add_option("--r", sim.r, "Target rank")->capture_default_str();
  simulate->add_option("--dist", sim.dist, "Entry law, e.g. gaussian:1.0, student-t:5:1.0")->capture_default_str();
  simulate->add_option("--C", sim.c, "Signal: zero | diag:.. | ladder:top=..,count=.. | equal:lambda=.. | rank1:lambda=..[,u=RULE] | file:path")
      ->capture_default_str();
  simulate->add_option("--reps", sim.reps, "Replications")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Root seed")->capture_default_str();
  simulate->add_option("--workers", sim.workers, "Worker threads (results do not depend on it)")->capture_default_str();
  simulate->add_option("--stats", sim.stats, "Statistics to estimate")->capture_default_str();
  add_output(simulate, sim.o);

  // verify ------------------------------------------------------------------
  struct {
    std::size_t m = 8, r = 2, trials = 100, projections = 10;
    std::string dist = "gaussian:1.0", c;
    std::uint64_t seed = 1;
    Output o;
  } ver;
  CLI::App* verify = app.add_subcommand("verify", "Pathwise suites: prop1, lemma1, lemma2, decomposition, sandwich");
  verify->add_option("--M", ver.m, "Dimension")->capture_default_str();
  verify->add_option("--r", ver.r, "Rank")->capture_default_str();
  verify->add_option("--dist", ver.dist, "Noise entry law")->capture_default_str();
  verify->add_option("--C", ver.c, "Fixed signal (default: fresh Gaussian C per trial)");
  verify->add_option("--trials", ver.trials, "Trials per suite")->capture_default_str();
  verify->add_option("--projections", ver.projections, "Haar projections per trial")->capture_default_str();
  verify->add_option("--seed", ver.seed, "Root seed")->capture_default_str();
  add_output(verify, ver.o);

  // sweep -------------------------------------------------------------------
  struct {
    std::vector<std::size_t> m{16, 32, 64, 128};
    std::vector<std::string> r{"auto"}, c{"zero"}, dist{"gaussian:1.0"};
    std::size_t reps = 200, workers = 1;
    std::uint64_t seed = 1;
    Output o;
  } swp;
  CLI::App* sweep = app.add_subcommand("sweep", "Ratio of E sup Z to the universal bound over a grid");
  sweep->add_option("--M", swp.m, "Dimensions")->capture_default_str();
  sweep->add_option("--r", swp.r, "Ranks; 'auto' means 1, M/4, M/2, M-1")->capture_default_str();
  sweep->add_option("--C", swp.c, "Signals (repeat the flag for several)")->capture_default_str();
  sweep->add_option("--dist", swp.dist, "Entry laws")->capture_default_str();
  sweep->add_option("--reps", swp.reps, "Replications per configuration")->capture_default_str();
  sweep->add_option("--seed", swp.seed, "Root seed")->capture_default_str();
  sweep->add_option("--workers", swp.workers, "Worker threads")->capture_default_str();
  add_output(sweep, swp.o);

  // localize ----------------------------------------------------------------
  struct {
    std::size_t m = 512, trials = 50;
    double lambda = 3.0, slack = 0.2;
    std::string dist = "gaussian:1.0", u = "finite:1";
    std::uint64_t seed = 1;
    Output o;
  } loc;
  CLI::App* localize = app.add_subcommand("localize", "Largest singular value of a rank-one signal plus normalized noise");
  localize->add_option("--M", loc.m, "Dimension")->capture_default_str();
  localize->add_option("--lambda", loc.lambda, "Signal singular value")->capture_default_str();
  localize->add_option("--u", loc.u, "Singular vector rule: ones | finite:k | file:path")->capture_default_str();
  localize->add_option("--dist", loc.dist, "Noise entry law")->capture_default_str();
  localize->add_option("--trials", loc.trials, "Seeds")->capture_default_str();
  localize->add_option("--slack", loc.slack, "Allowed distance outside the interval")->capture_default_str();
  localize->add_option("--seed", loc.seed, "Root seed")->capture_default_str();
  add_output(localize, loc.o);

  // rank-select -------------------------------------------------------------
  struct {
    std::string in;
    double alpha = 0.9, sigma = 0.0;
  } rs;
  CLI::App* rank_sel = app.add_subcommand("rank-select", "Energy-based rank selection on a matrix file");
  rank_sel->add_option("--in", rs.in, "Matrix file (.csv or raw binary)")->required();
  rank_sel->add_option("--alpha", rs.alpha, "Target energy fraction in (0, 1]")->capture_default_str();
  rank_sel->add_option("--sigma", rs.sigma, "Known noise standard deviation per entry")->capture_default_str();

  // slln --------------------------------------------------------------------
  struct {
    std::string rule = "ones", dist = "gaussian:1.0";
    std::vector<std::size_t> grid{256, 1024, 4096};
    std::size_t trials = 20;
    std::uint64_t seed = 1;
    Output o{"", "csv"};
  } sl;
  CLI::App* slln = app.add_subcommand("slln", "Trajectories of the covariance quadratic form over a nested M grid");
  slln->add_option("--rule", sl.rule, "u rule: ones | finite:k | file:path")->capture_default_str();
  slln->add_option("--dist", sl.dist, "Entry law")->capture_default_str();
  slln->add_option("--grid", sl.grid, "Increasing dimensions")->capture_default_str();
  slln->add_option("--trials", sl.trials, "Seeds")->capture_default_str();
  slln->add_option("--seed", sl.seed, "Root seed")->capture_default_str();
  add_output(slln, sl.o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) {
      failure_command = "simulate";
      failure_seed = sim.seed;
      ExperimentConfig cfg;
      cfg.signal = SignalSpec::parse(sim.c);
      cfg.m = sim.m ? sim.m : cfg.signal.natural_dim().value_or(0);
      if (cfg.m == 0) throw InvalidInput("--M is required for signal '" + sim.c + "'");
      cfg.r = sim.r;
      cfg.dist = EntryDistribution::parse(sim.dist);
      cfg.reps = sim.reps;
      cfg.seed = Seed{sim.seed, 0, 0};
      failure_config = report::to_json(cfg);
      cfg.validate();
      EstimateOptions opts;
      opts.workers = sim.workers;

      std::vector<std::pair<Statistic, MCEstimate>> estimates;
      std::optional<MCEstimate> sigma1;
      for (const std::string& s : sim.stats) {
        const Statistic stat = parse_statistic(s);
        estimates.emplace_back(stat, estimate(cfg, stat, opts));
        if (stat == Statistic::Sigma1) sigma1 = estimates.back().second;
      }
      if (!sigma1) sigma1 = estimate(cfg, Statistic::Sigma1, opts);
      const BoundReport bounds =
          make_bound_report(singular_values(cfg.signal.build(cfg.m)), cfg.m, cfg.r, cfg.dist, sigma1->mean);

      Json doc;
      doc["manifest"] = run_manifest("simulate", failure_config, sim.seed, started, report::Outcome::Pass);
      doc["config"] = failure_config;
      doc["bounds"] = report::to_json(bounds);
      Json est = Json::object();
      for (const auto& [stat, e] : estimates) est[std::string(to_string(stat))] = report::to_json(e);
      doc["estimates"] = est;
      emit(sim.o, out, doc, [&](std::ostream& os) { report::write_simulation_csv(os, cfg, estimates, bounds); });
    } else if (*verify) {
      failure_command = "verify";
      failure_seed = ver.seed;
      VerifyConfig cfg;
      cfg.m = ver.m;
      cfg.r = ver.r;
      cfg.dist = EntryDistribution::parse(ver.dist);
      if (!ver.c.empty()) cfg.signal = SignalSpec::parse(ver.c);
      cfg.trials = ver.trials;
      cfg.seed = ver.seed;
      cfg.projections_per_trial = ver.projections;
      Json config{{"M", cfg.m}, {"r", cfg.r}, {"dist", cfg.dist.to_string()},
                  {"C", ver.c.empty() ? "random-gaussian" : ver.c}, {"trials", cfg.trials},
                  {"projections", cfg.projections_per_trial}, {"seed", cfg.seed}};
      failure_config = config;
      const auto suites = verify_all(cfg);
      std::size_t violations = 0;
      std::vector<std::string> repro;
      Json js = Json::array();
      for (const auto& s : suites) {
        violations += s.violations;
        repro.insert(repro.end(), s.reproducers.begin(), s.reproducers.end());
        js.push_back(report::to_json(s));
      }
      const auto outcome = violations == 0 ? report::Outcome::Pass : report::Outcome::Fail;
      Json doc;
      doc["manifest"] = run_manifest("verify", config, cfg.seed, started, outcome, repro);
      doc["violations"] = violations;
      doc["suites"] = js;
      emit(ver.o, out, doc, [&](std::ostream& os) { report::write_suites_csv(os, suites); });
      if (!ver.o.path.empty()) out << "violations " << violations << '\n';
      status = violations == 0 ? 0 : 1;
    } else if (*sweep) {
      failure_command = "sweep";
      failure_seed = swp.seed;
      std::vector<ExperimentConfig> grid;
      std::uint64_t label = 0;
      for (const std::string& d : swp.dist)
        for (const std::string& c : swp.c)
          for (std::size_t m : swp.m)
            for (std::size_t r : resolve_ranks(swp.r, m)) {
              ExperimentConfig cfg;
              cfg.m = m;
              cfg.r = r;
              cfg.signal = SignalSpec::parse(c);
              cfg.dist = EntryDistribution::parse(d);
              cfg.reps = swp.reps;
              cfg.seed = Seed{swp.seed, label++, 0};
              grid.push_back(std::move(cfg));
            }
      Json config{{"M", swp.m}, {"r", swp.r}, {"C", swp.c}, {"dist", swp.dist}, {"reps", swp.reps}, {"seed", swp.seed}};
      failure_config = config;
      EstimateOptions opts;
      opts.workers = swp.workers;
      const RatioTable table = ratio_report(grid, opts);
      Json doc;
      doc["manifest"] = run_manifest("sweep", config, swp.seed, started, report::Outcome::Pass);
      doc["table"] = report::to_json(table);
      emit(swp.o, out, doc, [&](std::ostream& os) { report::write_ratio_csv(os, table); });
    } else if (*localize) {
      failure_command = "localize";
      failure_seed = loc.seed;
      const EntryDistribution dist = EntryDistribution::parse(loc.dist);
      std::ostringstream spec;
      spec << "rank1:lambda=" << report::format_double(loc.lambda) << ",u=" << loc.u;
      const Matrix c = SignalSpec::parse(spec.str()).build(loc.m);
      const SingularInterval iv = singular_interval(loc.lambda, 0.0, std::sqrt(dist.variance()));
      Json config{{"M", loc.m}, {"C", spec.str()}, {"dist", dist.to_string()}, {"trials", loc.trials},
                  {"slack", report::number(loc.slack)}, {"seed", loc.seed}};
      failure_config = config;
      Json rows = Json::array();
      std::vector<std::string> repro;
      std::vector<std::pair<std::size_t, double>> values;
      for (std::size_t t = 0; t < loc.trials; ++t) {
        const double top = spiked_top_singular(c, dist, Seed{loc.seed, 0, t});
        values.emplace_back(t, top);
        const bool inside = iv.contains(top, loc.slack);
        if (!inside) repro.push_back("localize seed=" + std::to_string(loc.seed) + " replication=" + std::to_string(t));
        rows.push_back({{"replication", t}, {"lambda1_hat", report::number(top)}, {"inside", inside}});
      }
      const auto outcome = repro.empty() ? report::Outcome::Pass : report::Outcome::Fail;
      Json doc;
      doc["manifest"] = run_manifest("localize", config, loc.seed, started, outcome, repro);
      doc["interval"] = {{"lower", report::number(iv.lower)}, {"upper", report::number(iv.upper)}};
      doc["runs"] = rows;
      emit(loc.o, out, doc, [&](std::ostream& os) {
        report::CsvWriter w(os);
        w.row({"seed", "replication", "M", "lambda1_hat", "lower", "upper", "inside"});
        for (const auto& [t, v] : values)
          w.row({std::to_string(loc.seed), std::to_string(t), std::to_string(loc.m), report::format_double(v),
                 report::format_double(iv.lower), report::format_double(iv.upper),
                 iv.contains(v, loc.slack) ? "1" : "0"});
      });
      status = repro.empty() ? 0 : 1;
    } else if (*rank_sel) {
      failure_command = "rank-select";
      const Matrix x = io::read_matrix(rs.in);
      RankSelectionConfig cfg{rs.alpha, rs.sigma * rs.sigma};
      if (!(rs.sigma >= 0.0)) throw InvalidInput("--sigma must be nonnegative");
      const auto r = empirical_rank_select(x, cfg);
      if (r)
        out << *r << '\n';
      else
        out << "none\n";
    } else if (*slln) {
      failure_command = "slln";
      failure_seed = sl.seed;
      const SequenceRule rule = SequenceRule::parse(sl.rule);
      const EntryDistribution dist = EntryDistribution::parse(sl.dist);
      Json config{{"rule", rule.to_string()}, {"dist", dist.to_string()}, {"grid", sl.grid}, {"trials", sl.trials},
                  {"seed", sl.seed}};
      failure_config = config;
      std::vector<std::pair<std::size_t, std::vector<TrajectoryPoint>>> runs;
      for (std::size_t t = 0; t < sl.trials; ++t)
        runs.emplace_back(t, slln_trajectory(rule, dist, sl.grid, Seed{sl.seed, 0, t}));
      Json rows = Json::array();
      for (const auto& [t, traj] : runs)
        for (const auto& p : traj)
          rows.push_back({{"replication", t}, {"M", p.m}, {"statistic", "Z_M"}, {"value", report::number(p.z)}});
      Json doc;
      doc["manifest"] = run_manifest("slln", config, sl.seed, started, report::Outcome::Pass);
      doc["limit"] = report::number(dist.variance());
      doc["trajectories"] = rows;
      emit(sl.o, out, doc, [&](std::ostream& os) {
        report::CsvWriter w(os);
        w.row({"seed", "replication", "M", "statistic", "value"});
        for (const auto& [t, traj] : runs)
          for (const auto& p : traj)
            w.row({std::to_string(sl.seed), std::to_string(t), std::to_string(p.m), "Z_M", report::format_double(p.z)});
      });
    }
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const OutOfHypothesis& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    // numerical failure: emit a manifest that pins down the failing run
    err << "error: " << e.what() << '\n';
    err << run_manifest(failure_command, failure_config, failure_seed, started, report::Outcome::Error, {e.what()})
               .dump(2)
        << '\n';
    return 1;
  }
  return status;
}

}  // namespace dproj::cli
