#include "labelkit/domain.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace labelkit {

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

OutOfDomainError::OutOfDomainError(int code_)
    : Error("label code out of domain: " + std::to_string(code_) + " (expected -1, 0, or 1)"),
      code(code_) {}

int encode_label(Label label) {
  switch (label) {
    case Label::Yes: return 1;
    case Label::No: return -1;
    case Label::Unclear: return 0;
  }
  throw Error("invalid Label enum value");
}

Label decode_label(int code) {
  switch (code) {
    case 1: return Label::Yes;
    case -1: return Label::No;
    case 0: return Label::Unclear;
    default: throw OutOfDomainError(code);
  }
}

std::string label_text(Label label) {
  switch (label) {
    case Label::Yes: return "Yes";
    case Label::No: return "No";
    case Label::Unclear: return "Unclear";
  }
  throw Error("invalid Label enum value");
}

std::optional<Label> parse_label(std::string_view text) {
  const std::string lowered = to_lower(text);
  if (lowered == "yes") return Label::Yes;
  if (lowered == "no") return Label::No;
  if (lowered == "unclear") return Label::Unclear;
  return std::nullopt;
}

std::size_t label_index(Label label) {
  switch (label) {
    case Label::Yes: return 0;
    case Label::No: return 1;
    case Label::Unclear: return 2;
  }
  throw Error("invalid Label enum value");
}

Label label_at(std::size_t index) {
  if (index > 2) throw Error("label index out of range: " + std::to_string(index));
  return kAllLabels[index];
}

std::string category_key(Category category) {
  switch (category) {
    case Category::PhysicalActivity: return "physical_activity";
    case Category::SedentaryBehavior: return "sedentary_behavior";
    case Category::SleepProblems: return "sleep_problems";
  }
  throw Error("invalid Category enum value");
}

std::optional<Category> parse_category(std::string_view key) {
  for (Category c : kAllCategories) {
    if (category_key(c) == key) return c;
  }
  return std::nullopt;
}

std::string source_key(const LabelSource& source) {
  std::string prefix;
  switch (source.kind) {
    case SourceKind::CrowdWorker: prefix = "crowd"; break;
    case SourceKind::Expert: prefix = "expert"; break;
    case SourceKind::Llm: prefix = "llm"; break;
  }
  return prefix + std::to_string(source.index);
}

std::optional<LabelSource> parse_source(std::string_view key) {
  const std::array<std::pair<std::string_view, SourceKind>, 3> prefixes{{
      {"crowd", SourceKind::CrowdWorker},
      {"expert", SourceKind::Expert},
      {"llm", SourceKind::Llm},
  }};
  for (const auto& [prefix, kind] : prefixes) {
    if (!key.starts_with(prefix)) continue;
    std::string_view digits = key.substr(prefix.size());
    if (digits.empty()) return std::nullopt;
    int index = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') return std::nullopt;
      index = index * 10 + (c - '0');
      if (index > 1000) return std::nullopt;
    }
    if (index < 1) return std::nullopt;
    return LabelSource{kind, index};
  }
  return std::nullopt;
}

std::optional<Label> AnnotatedItem::label_for(const LabelSource& source) const {
  auto it = labels.find(source);
  if (it == labels.end()) return std::nullopt;
  return it->second;
}

VoteError::VoteError(Kind kind_, const std::string& what) : Error(what), kind(kind_) {}

Label vote_or_unclear(const std::vector<Label>& votes) {
  if (votes.empty()) throw VoteError(VoteError::Kind::EmptyVotes, "majority vote over zero votes");
  std::size_t counts[3] = {0, 0, 0};
  for (Label v : votes) counts[label_index(v)]++;
  for (Label candidate : kAllLabels) {
    if (2 * counts[label_index(candidate)] > votes.size()) return candidate;
  }
  return Label::Unclear;
}

Label majority_vote(const std::vector<Label>& votes) {
  if (votes.empty()) throw VoteError(VoteError::Kind::EmptyVotes, "majority vote over zero votes");
  if (votes.size() % 2 == 0) {
    throw VoteError(VoteError::Kind::EvenArity,
                    "majority vote requires odd arity, got " + std::to_string(votes.size()));
  }
  return vote_or_unclear(votes);
}

}  // namespace labelkit
