#pragma once

#include "dproj/linalg.hpp"

#include <filesystem>
#include <iosfwd>

namespace dproj::io {

// CSV: one matrix row per line, comma-separated.
Matrix read_csv(std::istream& in);
Matrix read_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const Matrix& a);

// Raw binary: uint32 rows, uint32 cols (little-endian), then rows*cols
// little-endian float64 values in row-major order.
Matrix read_binary(std::istream& in);
void write_binary(std::ostream& out, const Matrix& a);

// Dispatches on extension: ".csv" is CSV, anything else is raw binary.
Matrix read_matrix(const std::filesystem::path& path);

}  // namespace dproj::io
