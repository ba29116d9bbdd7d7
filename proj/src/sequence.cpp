#include "dproj/sequence.hpp"

#include "dproj/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace dproj {

SequenceRule SequenceRule::ones() { return SequenceRule{}; }

SequenceRule SequenceRule::finite_support(std::size_t k) {
  if (k < 1) throw InvalidInput("finite-support rule needs k >= 1");
  SequenceRule s;
  s.kind_ = Kind::FiniteSupport;
  s.support_ = k;
  return s;
}

SequenceRule SequenceRule::custom(std::vector<double> values) {
  SequenceRule s;
  s.kind_ = Kind::Custom;
  s.values_ = std::move(values);
  return s;
}

SequenceRule SequenceRule::parse(std::string_view spec) {
  if (spec == "ones") return ones();
  if (spec.starts_with("finite:")) {
    const std::string_view num = spec.substr(7);
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
    if (ec != std::errc() || ptr != num.data() + num.size()) throw InvalidInput("bad sequence rule '" + std::string(spec) + "'");
    return finite_support(k);
  }
  if (spec.starts_with("file:")) {
    const std::string path(spec.substr(5));
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open sequence file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    for (char& ch : text)
      if (ch == ',') ch = ' ';
    std::istringstream is(text);
    std::vector<double> values;
    double v = 0.0;
    while (is >> v) values.push_back(v);
    if (!is.eof()) throw InvalidInput("sequence file " + path + ": non-numeric content");
    SequenceRule s = custom(std::move(values));
    s.source_ = path;
    return s;
  }
  throw InvalidInput("unknown sequence rule '" + std::string(spec) + "'");
}

std::string SequenceRule::to_string() const {
  switch (kind_) {
    case Kind::Ones: return "ones";
    case Kind::FiniteSupport: return "finite:" + std::to_string(support_);
    case Kind::Custom: return source_.empty() ? "custom:" + std::to_string(values_.size()) : "file:" + source_;
  }
  return {};
}

double SequenceRule::at(std::size_t i) const noexcept {
  switch (kind_) {
    case Kind::Ones: return 1.0;
    case Kind::FiniteSupport: return i <= support_ ? 1.0 : 0.0;
    case Kind::Custom: return (i >= 1 && i <= values_.size()) ? values_[i - 1] : 0.0;
  }
  return 0.0;
}

std::vector<double> SequenceRule::prefix(std::size_t m) const {
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = at(i + 1);
  return out;
}

}  // namespace dproj
