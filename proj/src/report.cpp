#include "dproj/report.hpp"

#include "dproj/errors.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>

namespace dproj::report {

Json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

double read_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw InvalidInput("report: expected a number or \"inf\"");
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Json to_json(const BoundReport& b) {
  Json j;
  j["I"] = number(b.I);
  j["II"] = number(b.II);
  j["III"] = number(b.III);
  j["I_prime"] = number(b.I_prime);
  j["II_prime"] = number(b.II_prime);
  j["III_prime"] = number(b.III_prime);
  j["Y"] = number(b.Y);
  j["thm3_value"] = number(b.thm3_value);
  j["thm1_gaussian"] = b.thm1_gaussian ? number(*b.thm1_gaussian) : Json(nullptr);
  j["latala_rhs"] = number(b.latala_rhs);
  j["r_M"] = b.r_M;
  j["delta_r"] = number(b.delta_r);
  j["sigma1"] = number(b.sigma1);
  return j;
}

Json to_json(const MCEstimate& e) {
  Json j;
  j["mean"] = number(e.mean);
  j["std_error"] = number(e.std_error);
  j["n"] = e.n;
  j["min"] = number(e.min);
  j["max"] = number(e.max);
  return j;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["M"] = c.m;
  j["r"] = c.r;
  j["C"] = c.signal.text();
  j["dist"] = c.dist.to_string();
  j["reps"] = c.reps;
  j["seed"] = c.seed.root;
  j["experiment"] = c.seed.experiment;
  j["normalization"] = c.normalization == Normalization::InvSqrtM ? "inv-sqrt-M" : "none";
  return j;
}

Json to_json(const RatioTable& t) {
  Json rows = Json::array();
  for (const RatioRow& row : t.rows) {
    Json j;
    j["config"] = to_json(row.config);
    j["z_sup"] = to_json(row.z_sup);
    j["thm3_value"] = number(row.thm3_value);
    j["ratio"] = number(row.ratio);
    rows.push_back(std::move(j));
  }
  Json j;
  j["rows"] = std::move(rows);
  j["max_ratio"] = number(t.max_ratio);
  return j;
}

Json to_json(const SuiteResult& s) {
  Json j;
  j["suite"] = s.name;
  j["checks"] = s.checks;
  j["violations"] = s.violations;
  j["worst_margin"] = number(s.worst_margin);
  j["reproducers"] = s.reproducers;
  return j;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Error: return "error";
  }
  return "error";
}

Json to_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["version"] = m.version;
  j["seed_root"] = m.seed_root;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["outcome"] = std::string(to_string(m.outcome));
  j["reproducers"] = m.reproducers;
  return j;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\r\n") == std::string::npos) {
      os_ << c;
      continue;
    }
    os_ << '"';
    for (char ch : c) {
      if (ch == '"') os_ << '"';
      os_ << ch;
    }
    os_ << '"';
  }
  os_ << "\r\n";
}

namespace {

std::vector<std::string> config_cells(const ExperimentConfig& c) {
  return {std::to_string(c.m), std::to_string(c.r), c.signal.text(), c.dist.to_string(), std::to_string(c.seed.root),
          std::to_string(c.reps)};
}

const std::vector<std::string> kConfigHeader{"M", "r", "C", "dist", "seed", "reps"};

}  // namespace

void write_simulation_csv(std::ostream& os, const ExperimentConfig& c,
                          const std::vector<std::pair<Statistic, MCEstimate>>& estimates, const BoundReport& b) {
  CsvWriter w(os);
  auto header = kConfigHeader;
  header.insert(header.end(), {"statistic", "mean", "std_error", "n", "min", "max"});
  w.row(header);
  for (const auto& [stat, e] : estimates) {
    auto cells = config_cells(c);
    cells.insert(cells.end(), {std::string(to_string(stat)), format_double(e.mean), format_double(e.std_error),
                               std::to_string(e.n), format_double(e.min), format_double(e.max)});
    w.row(cells);
  }
  const Json bj = to_json(b);
  for (const auto& [key, value] : bj.items()) {
    auto cells = config_cells(c);
    std::string v;
    if (value.is_null()) v = "";
    else if (value.is_number_unsigned()) v = std::to_string(value.get<std::size_t>());
    else v = format_double(read_number(value));
    cells.insert(cells.end(), {"bound:" + key, v, "", "", "", ""});
    w.row(cells);
  }
}

void write_ratio_csv(std::ostream& os, const RatioTable& t) {
  CsvWriter w(os);
  auto header = kConfigHeader;
  header.insert(header.end(), {"z_sup_mean", "z_sup_std_error", "thm3_value", "ratio"});
  w.row(header);
  for (const RatioRow& row : t.rows) {
    auto cells = config_cells(row.config);
    cells.insert(cells.end(), {format_double(row.z_sup.mean), format_double(row.z_sup.std_error),
                               format_double(row.thm3_value), format_double(row.ratio)});
    w.row(cells);
  }
}

void write_suites_csv(std::ostream& os, const std::vector<SuiteResult>& suites) {
  CsvWriter w(os);
  w.row({"suite", "checks", "violations", "worst_margin"});
  for (const SuiteResult& s : suites)
    w.row({s.name, std::to_string(s.checks), std::to_string(s.violations), format_double(s.worst_margin)});
}

}  // namespace dproj::report
