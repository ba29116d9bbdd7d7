#pragma once

// JSON and CSV emission. Infinite values are written as the string "inf";
// finite doubles use the shortest representation that reads back to the
// same bits.

#include "dproj/bounds.hpp"
#include "dproj/montecarlo.hpp"
#include "dproj/verify.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace dproj::report {

inline constexpr std::string_view kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

Json number(double v);
// Inverse of number(): accepts a JSON number or "inf" / "-inf".
double read_number(const Json& j);
std::string format_double(double v);

Json to_json(const BoundReport& b);
Json to_json(const MCEstimate& e);
Json to_json(const ExperimentConfig& c);
Json to_json(const RatioTable& t);
Json to_json(const SuiteResult& s);

enum class Outcome { Pass, Fail, Error };
std::string_view to_string(Outcome o);

struct RunManifest {
  std::string command;
  Json config = Json::object();
  std::string version{kVersion};
  std::uint64_t seed_root = 0;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  Outcome outcome = Outcome::Pass;
  std::vector<std::string> reproducers;
};
Json to_json(const RunManifest& m);
std::string utc_now();

// Minimal RFC 4180 writer.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& os_;
};

// One row per (config, statistic); bound values follow as rows whose
// statistic column names the bound and whose `mean` column holds its value.
void write_simulation_csv(std::ostream& os, const ExperimentConfig& c,
                          const std::vector<std::pair<Statistic, MCEstimate>>& estimates, const BoundReport& b);
void write_ratio_csv(std::ostream& os, const RatioTable& t);
void write_suites_csv(std::ostream& os, const std::vector<SuiteResult>& suites);

}  // namespace dproj::report
