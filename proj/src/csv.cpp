#include "celerlog/csv.hpp"

#include "celerlog/model.hpp"

namespace celerlog {

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(',');
    out << csv_escape(fields[i]);
  }
  out.put('\n');
}

std::optional<std::vector<std::string>> CsvReader::next() {
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  int ch;
  while ((ch = in_.get()) != std::char_traits<char>::eof()) {
    any = true;
    char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (in_.peek() == '\n') in_.get();
      break;
    } else if (c == '\n') {
      break;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw IoError("unterminated quoted CSV field near row " + std::to_string(rows_ + 1));
  if (!any) return std::nullopt;
  row.push_back(std::move(field));
  ++rows_;
  return row;
}

std::optional<std::size_t> column_index(std::span<const std::string> header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string_view h = header[i];
    // Tolerate a UTF-8 byte order mark on the first column.
    if (i == 0 && h.starts_with("\xEF\xBB\xBF")) h.remove_prefix(3);
    if (h == name) return i;
  }
  return std::nullopt;
}

std::string join_parameters(std::span<const std::string> parameters) {
  std::string out;
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    if (i) out.push_back('|');
    for (char c : parameters[i]) {
      if (c == '|') out.push_back('\\');
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> split_parameters(std::string_view joined) {
  std::vector<std::string> out;
  if (joined.empty()) return out;
  std::string current;
  for (std::size_t i = 0; i < joined.size(); ++i) {
    char c = joined[i];
    if (c == '\\' && i + 1 < joined.size() && joined[i + 1] == '|') {
      current.push_back('|');
      ++i;
    } else if (c == '|') {
      out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  out.push_back(std::move(current));
  return out;
}

}  // namespace celerlog
