#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "labelkit/domain.hpp"

namespace labelkit {

struct CsvError : Error {
  enum class Kind {
    Malformed,
    MissingColumn,
    DuplicateId,
    BadLabelCell,
    Encoding,
    MissingLabel,
  };
  CsvError(Kind kind, const std::string& what);
  Kind kind;
};

// RFC-4180: comma separator, double-quote quoting with "" escapes, LF or
// CRLF row ends, quoted fields may span lines. Cell bytes are preserved
// exactly after unescaping.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Quotes only when the field requires it (comma, quote, CR, LF).
std::string csv_escape(std::string_view field);

std::string render_csv_row(const std::vector<std::string>& fields);

}  // namespace labelkit
