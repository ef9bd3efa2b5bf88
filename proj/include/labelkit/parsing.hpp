#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "labelkit/domain.hpp"

namespace labelkit {

struct ParsedReply {
  std::vector<std::pair<std::string, Label>> records;  // reply order
  std::vector<std::pair<std::size_t, std::string>> rejected_lines;  // empty when accepted
  std::vector<std::string> expected_ids;  // order canonicalize_reply emits
};

// Reject-and-retry signal. detail always names at least one offending line
// or id.
struct ValidationError {
  enum class Kind { FormatMismatch, IdSetMismatch, InvalidLabel, DuplicateId };
  Kind kind = Kind::FormatMismatch;
  std::string detail;
};

std::string_view validation_kind_name(ValidationError::Kind kind);

using ParseResult = std::variant<ParsedReply, ValidationError>;

inline bool accepted(const ParseResult& result) {
  return std::holds_alternative<ParsedReply>(result);
}

// Accepts iff every non-blank line is `id,label` with a known id and a valid
// label (case-insensitive), each expected id appears exactly once, and no
// unexpected ids appear. Tolerates surrounding whitespace and one wrapping
// code fence. On rejection returns the most specific error:
// DuplicateId > InvalidLabel > IdSetMismatch > FormatMismatch.
ParseResult parse_response(std::string_view raw, const std::vector<std::string>& expected_ids);

// Canonical `id,label` lines in expected-id order, one trailing newline.
// Reparsing the result reproduces the records.
std::string canonicalize_reply(const ParsedReply& reply);

}  // namespace labelkit
