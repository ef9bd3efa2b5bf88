#include "labelkit/parsing.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace labelkit {

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto eol = text.find('\n', start);
    if (eol == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, eol - start));
    start = eol + 1;
  }
  return lines;
}

// Strips one wrapping triple-backtick fence (with optional language tag).
std::string_view strip_code_fence(std::string_view body) {
  std::string_view trimmed = trim(body);
  if (!trimmed.starts_with("```")) return body;
  const auto head_end = trimmed.find('\n');
  if (head_end == std::string_view::npos) return body;
  // Opening line must be ``` plus at most a short language tag.
  const std::string_view head = trim(trimmed.substr(3, head_end - 3));
  if (head.find_first_of(" \t`") != std::string_view::npos) return body;
  std::string_view inner = trimmed.substr(head_end + 1);
  const std::string_view tail = trim(inner);
  if (!tail.ends_with("```")) return body;
  const auto close = inner.rfind("```");
  return inner.substr(0, close);
}

struct LineRecord {
  std::size_t line_number;  // 1-based within the (unfenced) reply body
  std::string id;
  std::string label_token;
  std::optional<Label> label;
};

}  // namespace

std::string_view validation_kind_name(ValidationError::Kind kind) {
  switch (kind) {
    case ValidationError::Kind::FormatMismatch: return "FormatMismatch";
    case ValidationError::Kind::IdSetMismatch: return "IdSetMismatch";
    case ValidationError::Kind::InvalidLabel: return "InvalidLabel";
    case ValidationError::Kind::DuplicateId: return "DuplicateId";
  }
  return "Unknown";
}

ParseResult parse_response(std::string_view raw, const std::vector<std::string>& expected_ids) {
  if (expected_ids.empty()) throw Error("parse_response requires a nonempty expected id set");

  const std::string_view body = strip_code_fence(raw);
  std::vector<LineRecord> records;
  std::vector<std::pair<std::size_t, std::string>> malformed;

  std::size_t line_number = 0;
  for (std::string_view line : split_lines(body)) {
    line_number++;
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    // The label is the last comma-separated field, so ids may contain commas.
    const auto comma = content.rfind(',');
    if (comma == std::string_view::npos) {
      malformed.emplace_back(line_number, "no comma separator");
      continue;
    }
    const std::string_view id = trim(content.substr(0, comma));
    const std::string_view token = trim(content.substr(comma + 1));
    if (id.empty() || token.empty()) {
      malformed.emplace_back(line_number, "empty id or label field");
      continue;
    }
    records.push_back(
        {line_number, std::string(id), std::string(token), parse_label(token)});
  }

  // Most specific first: duplicates among id-bearing lines.
  {
    std::map<std::string_view, std::size_t> first_seen;
    for (const auto& rec : records) {
      const auto [it, inserted] = first_seen.emplace(rec.id, rec.line_number);
      if (!inserted) {
        return ValidationError{ValidationError::Kind::DuplicateId,
                               "id '" + rec.id + "' repeated on line " +
                                   std::to_string(rec.line_number) + " (first on line " +
                                   std::to_string(it->second) + ")"};
      }
    }
  }

  for (const auto& rec : records) {
    if (!rec.label) {
      return ValidationError{ValidationError::Kind::InvalidLabel,
                             "invalid label '" + rec.label_token + "' for id '" + rec.id +
                                 "' on line " + std::to_string(rec.line_number)};
    }
  }

  {
    std::set<std::string_view> expected(expected_ids.begin(), expected_ids.end());
    std::vector<std::string_view> unexpected;
    for (const auto& rec : records) {
      if (!expected.erase(std::string_view(rec.id))) unexpected.push_back(rec.id);
    }
    if (!expected.empty() || !unexpected.empty()) {
      std::string detail;
      if (!expected.empty()) {
        detail += "missing ids:";
        for (const auto& id : expected) detail += " " + std::string(id);
      }
      if (!unexpected.empty()) {
        if (!detail.empty()) detail += "; ";
        detail += "unexpected ids:";
        for (const auto& id : unexpected) detail += " " + std::string(id);
      }
      return ValidationError{ValidationError::Kind::IdSetMismatch, detail};
    }
  }

  if (!malformed.empty()) {
    const auto& [line, reason] = malformed.front();
    return ValidationError{ValidationError::Kind::FormatMismatch,
                           "line " + std::to_string(line) + ": " + reason + " (" +
                               std::to_string(malformed.size()) + " malformed line(s))"};
  }

  ParsedReply reply;
  reply.expected_ids = expected_ids;
  reply.records.reserve(records.size());
  for (auto& rec : records) {
    reply.records.emplace_back(std::move(rec.id), *rec.label);
  }
  return reply;
}

std::string canonicalize_reply(const ParsedReply& reply) {
  std::map<std::string_view, Label> by_id;
  for (const auto& [id, label] : reply.records) by_id.emplace(id, label);

  std::string out;
  for (const auto& id : reply.expected_ids) {
    const auto it = by_id.find(std::string_view(id));
    if (it == by_id.end()) throw Error("canonicalize_reply: no record for expected id '" + id + "'");
    out += id;
    out.push_back(',');
    out += label_text(it->second);
    out.push_back('\n');
  }
  return out;
}

}  // namespace labelkit
