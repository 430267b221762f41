#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kgddi::io {

// RFC-4180 escaping: a field holding a comma, quote, CR, or LF is quoted
// with inner quotes doubled; anything else passes through unchanged.
std::string csv_escape(const std::string& field);

// Shortest decimal form that parses back to the identical double, so a CSV
// written twice from the same numbers is byte-identical and lossless.
std::string format_double(double x);

// Emits RFC-4180 rows with CRLF line endings onto a caller-owned stream.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

}  // namespace kgddi::io
