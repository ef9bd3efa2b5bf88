#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace labelkit {

// Base class for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ternary annotation value. Integer codec: Yes=1, No=-1, Unclear=0.
enum class Label { Yes, No, Unclear };

inline constexpr Label kAllLabels[] = {Label::Yes, Label::No, Label::Unclear};

struct OutOfDomainError : Error {
  explicit OutOfDomainError(int code);
  int code;
};

int encode_label(Label label);
Label decode_label(int code);  // throws OutOfDomainError outside {-1,0,1}

// Text codec: parse is case-insensitive, render is canonical capitalization.
std::string label_text(Label label);
std::optional<Label> parse_label(std::string_view text);

// Fixed axis order Yes=0, No=1, Unclear=2 (matrix rows/columns, JSON keys).
std::size_t label_index(Label label);
Label label_at(std::size_t index);

enum class Category { PhysicalActivity, SedentaryBehavior, SleepProblems };

inline constexpr Category kAllCategories[] = {
    Category::PhysicalActivity, Category::SedentaryBehavior, Category::SleepProblems};

// Stable key used in config files and header lookups.
std::string category_key(Category category);
std::optional<Category> parse_category(std::string_view key);

enum class SourceKind { CrowdWorker, Expert, Llm };

// One labeler slot: a crowd worker, expert, or LLM run, numbered from 1.
struct LabelSource {
  SourceKind kind = SourceKind::Llm;
  int index = 1;

  auto operator<=>(const LabelSource&) const = default;
};

std::string source_key(const LabelSource& source);  // "crowd1", "expert2", "llm3"
std::optional<LabelSource> parse_source(std::string_view key);

struct AnnotatedItem {
  std::string id;
  std::string text;
  Category category = Category::PhysicalActivity;
  std::map<LabelSource, Label> labels;

  std::optional<Label> label_for(const LabelSource& source) const;
};

struct VoteError : Error {
  enum class Kind { EvenArity, EmptyVotes };
  VoteError(Kind kind, const std::string& what);
  Kind kind;
};

// Majority vote over an odd number of votes. A strict majority wins; without
// one (all three values present exactly once each at n=3, or a plurality tie
// at larger n) the result is Unclear. Permutation invariant.
Label majority_vote(const std::vector<Label>& votes);

// Same rule without the odd-arity requirement, for voting over the labels
// that survive partial run failures: agreement wins, any tie is Unclear.
Label vote_or_unclear(const std::vector<Label>& votes);

}  // namespace labelkit
