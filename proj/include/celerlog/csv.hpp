#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace celerlog {

// RFC 4180 quoting: fields containing a comma, quote, CR or LF are quoted
// and embedded quotes doubled.
std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

// Streams rows from RFC 4180 text. Quoted fields may span lines.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Next row, or nullopt at end of input. Throws IoError on an unterminated
  // quoted field.
  std::optional<std::vector<std::string>> next();
  std::size_t rows_read() const { return rows_; }

 private:
  std::istream& in_;
  std::size_t rows_ = 0;
};

// Index of `name` in a header row.
std::optional<std::size_t> column_index(std::span<const std::string> header, std::string_view name);

// Parameters joined by '|'; a literal '|' inside a parameter becomes "\|".
std::string join_parameters(std::span<const std::string> parameters);
std::vector<std::string> split_parameters(std::string_view joined);

}  // namespace celerlog
