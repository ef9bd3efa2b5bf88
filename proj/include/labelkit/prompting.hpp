#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "labelkit/domain.hpp"

namespace labelkit {

// Appended verbatim to every prompt, after the rules header. Defines the
// reply wire format that parse_response enforces.
extern const std::string kFormatContract;

struct PromptError : Error {
  enum class Kind { EmptyHeader, DuplicateIdInBatch, BadItemId };
  PromptError(Kind kind, const std::string& what);
  Kind kind;
};

// Rules header + fixed format contract. rules_text is the header file body;
// the contract is never author-supplied.
struct PromptHeader {
  Category category = Category::PhysicalActivity;
  std::string rules_text;
  std::string format_contract = kFormatContract;
};

PromptHeader load_header(const std::filesystem::path& path, Category category);

struct PromptText {
  std::string rendered;
  std::vector<std::string> item_ids;  // input order
};

// One item = one line: "<id>\t<escaped text>\n". Escapes backslash, LF, CR.
std::string escape_item_text(std::string_view text);
std::string render_item_line(const AnnotatedItem& item);

// Rules + contract, without the item list. Its token estimate is the
// header_tokens input to partition().
std::string render_preamble(const PromptHeader& header);

// Deterministic: identical inputs render byte-identical prompts. Ids must
// be unique and free of tabs and line breaks.
PromptText build_prompt(const PromptHeader& header, const std::vector<AnnotatedItem>& items);

// Recovers the (id, escaped-text) pairs from a rendered prompt. Used by the
// mock backend and the prompt round-trip checks.
std::vector<std::pair<std::string, std::string>> parse_prompt_items(std::string_view rendered);

}  // namespace labelkit
