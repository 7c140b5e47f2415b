#pragma once

// Dense matrix files.
//
// Binary layout ("PADM"), all little-endian:
//   bytes 0..3   magic "PADM"
//   bytes 4..7   u32 rows
//   bytes 8..11  u32 cols
//   then rows*cols IEEE-754 binary64 values, row-major.
//
// Anything not starting with the magic is read as CSV: one row per line,
// comma-separated values, blank lines and lines starting with '#' skipped.

#include "prunadag/core.hpp"

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>

namespace prunadag {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  /// 1-based line number, 0 when not line-oriented.
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

Matrix read_matrix(const std::filesystem::path& path);
Matrix read_matrix_csv(std::istream& in);

void write_matrix(const std::filesystem::path& path, const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// A solution file: the binary format with cols == 1.
Vector read_vector(const std::filesystem::path& path);
void write_vector(const std::filesystem::path& path, const Vector& v);

}  // namespace prunadag
