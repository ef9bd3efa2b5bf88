#include "labelkit/prompting.hpp"

#include <unordered_set>

#include "labelkit/io.hpp"

namespace labelkit {

const std::string kFormatContract =
    "Label every item below. Reply with exactly one line per item, in the form\n"
    "<id>,<label>\n"
    "where <label> is Yes, No, or Unclear. Use each item id exactly as given,\n"
    "include every id exactly once, and output nothing else: no explanations,\n"
    "no headers, no numbering, no code fences.";

namespace {

// Marks the start of the item list; parse_prompt_items keys off it.
constexpr std::string_view kItemsMarker = "Items:";

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' ||
                        s.front() == '\n'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ||
                        s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

PromptError::PromptError(Kind kind_, const std::string& what) : Error(what), kind(kind_) {}

PromptHeader load_header(const std::filesystem::path& path, Category category) {
  PromptHeader header;
  header.category = category;
  header.rules_text = read_text_file(path);
  if (trim_view(header.rules_text).empty()) {
    throw PromptError(PromptError::Kind::EmptyHeader, "empty header file: " + path.string());
  }
  return header;
}

std::string escape_item_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c); break;
    }
  }
  return out;
}

std::string render_item_line(const AnnotatedItem& item) {
  return item.id + "\t" + escape_item_text(item.text) + "\n";
}

std::string render_preamble(const PromptHeader& header) {
  std::string out = header.rules_text;
  out += "\n\n";
  out += header.format_contract;
  out += "\n\n";
  out += kItemsMarker;
  out += "\n";
  return out;
}

PromptText build_prompt(const PromptHeader& header, const std::vector<AnnotatedItem>& items) {
  if (items.empty()) {
    throw Error("cannot build a prompt from zero items");
  }
  PromptText prompt;
  prompt.rendered = render_preamble(header);
  prompt.item_ids.reserve(items.size());
  std::unordered_set<std::string> seen;
  for (const auto& item : items) {
    if (item.id.find_first_of("\t\r\n") != std::string::npos) {
      throw PromptError(PromptError::Kind::BadItemId,
                        "item id contains tab or line break: '" + item.id + "'");
    }
    if (!seen.insert(item.id).second) {
      throw PromptError(PromptError::Kind::DuplicateIdInBatch,
                        "duplicate id in batch: '" + item.id + "'");
    }
    prompt.rendered += render_item_line(item);
    prompt.item_ids.push_back(item.id);
  }
  return prompt;
}

std::vector<std::pair<std::string, std::string>> parse_prompt_items(std::string_view rendered) {
  const std::string marker = std::string("\n") + std::string(kItemsMarker) + "\n";
  const std::size_t at = rendered.rfind(marker);
  std::vector<std::pair<std::string, std::string>> items;
  if (at == std::string_view::npos) return items;

  std::string_view body = rendered.substr(at + marker.size());
  while (!body.empty()) {
    const std::size_t eol = body.find('\n');
    const std::string_view line =
        eol == std::string_view::npos ? body : body.substr(0, eol);
    body = eol == std::string_view::npos ? std::string_view() : body.substr(eol + 1);
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) continue;
    items.emplace_back(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
  }
  return items;
}

}  // namespace labelkit
