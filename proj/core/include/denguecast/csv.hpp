#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace denguecast::csv {

/// Raised for malformed input files; carries the 1-based line number when known.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Minimal RFC 4180 reader: comma-separated, double-quoted fields may embed
/// commas, quotes ("") and newlines. CRLF is accepted.
class Reader {
 public:
  explicit Reader(std::istream& in);

  /// Reads the next record into `fields`; returns false at end of input.
  bool next(std::vector<std::string>& fields);
  /// Line on which the most recently returned record started.
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

/// Reads a header row and checks it against `expected` (exact, in order).
void expect_header(Reader& reader, const std::vector<std::string>& expected, std::string_view file);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest round-trip decimal representation (std::to_chars), locale-free.
std::string format_double(double value);
std::string format_int(std::int64_t value);

double parse_double(std::string_view text, std::size_t line = 0);
std::int64_t parse_int(std::string_view text, std::size_t line = 0);

}  // namespace denguecast::csv
