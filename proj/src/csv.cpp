#include "labelkit/csv.hpp"

namespace labelkit {

CsvError::CsvError(Kind kind_, const std::string& what) : Error(what), kind(kind_) {}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
        } else {
          in_quotes = false;
          i += 1;
        }
      } else {
        if (c == '\n') line++;
        field.push_back(c);
        i += 1;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw CsvError(CsvError::Kind::Malformed,
                         "stray quote inside unquoted field at line " + std::to_string(line));
        }
        in_quotes = true;
        field_was_quoted = true;
        i += 1;
        break;
      case ',':
        end_field();
        i += 1;
        break;
      case '\r':
        if (i + 1 < n && text[i + 1] == '\n') {
          end_row();
          line++;
          i += 2;
        } else {
          throw CsvError(CsvError::Kind::Malformed,
                         "bare CR at line " + std::to_string(line));
        }
        break;
      case '\n':
        end_row();
        line++;
        i += 1;
        break;
      default:
        field.push_back(c);
        i += 1;
        break;
    }
  }
  if (in_quotes) {
    throw CsvError(CsvError::Kind::Malformed, "unterminated quoted field at end of input");
  }
  // Final row without a trailing newline.
  if (!field.empty() || field_was_quoted || !row.empty()) end_row();
  return rows;
}

std::string csv_escape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
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

std::string render_csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

}  // namespace labelkit
