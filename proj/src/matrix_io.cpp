#include "dproj/matrix_io.hpp"

#include "dproj/errors.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace dproj::io {

namespace {

static_assert(std::endian::native == std::endian::little, "raw matrix format assumes a little-endian host");

double parse_cell(std::string_view cell, std::size_t line) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw InvalidInput("csv line " + std::to_string(line) + ": cannot parse '" + std::string(cell) + "'");
  return v;
}

}  // namespace

Matrix read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      row.push_back(parse_cell(rest.substr(0, comma), lineno));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidInput("csv line " + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("csv: no rows");
  Matrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  require_finite(a, "csv");
  return a;
}

Matrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return read_csv(in);
}

void write_csv(std::ostream& out, const Matrix& a) {
  char buf[32];
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const auto res = std::to_chars(buf, buf + sizeof buf, a(i, j));
      if (j) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

Matrix read_binary(std::istream& in) {
  std::uint32_t dims[2] = {0, 0};
  if (!in.read(reinterpret_cast<char*>(dims), sizeof dims)) throw InvalidInput("binary matrix: truncated header");
  if (dims[0] == 0 || dims[1] == 0) throw InvalidInput("binary matrix: zero dimension");
  const std::size_t n = std::size_t{dims[0]} * dims[1];
  std::vector<double> data(n);
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(n * sizeof(double))))
    throw InvalidInput("binary matrix: truncated payload");
  Matrix a = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      data.data(), dims[0], dims[1]);
  require_finite(a, "binary matrix");
  return a;
}

void write_binary(std::ostream& out, const Matrix& a) {
  const std::uint32_t dims[2] = {static_cast<std::uint32_t>(a.rows()), static_cast<std::uint32_t>(a.cols())};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = a;
  out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
}

Matrix read_matrix(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return read_csv(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return read_binary(in);
}

}  // namespace dproj::io
