#include "labelkit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

#include "labelkit/csv.hpp"
#include "labelkit/io.hpp"

namespace labelkit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Accepts the text codec (any casing) or the integer codec.
std::optional<Label> parse_label_cell(std::string_view cell) {
  const std::string_view body = trim(cell);
  if (auto label = parse_label(body)) return label;
  int code = 0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), code);
  if (ec == std::errc() && ptr == body.data() + body.size()) {
    if (code == 1 || code == -1 || code == 0) return decode_label(code);
  }
  return std::nullopt;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name,
                        const std::filesystem::path& path) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw CsvError(CsvError::Kind::MissingColumn,
                   "column '" + name + "' not found in " + path.string());
  }
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

std::map<Category, std::size_t> Dataset::category_counts() const {
  std::map<Category, std::size_t> counts;
  for (const auto& item : items) counts[item.category]++;
  return counts;
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.id);
  return out;
}

const AnnotatedItem* Dataset::find(const std::string& id) const {
  for (const auto& item : items) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

Dataset load_dataset(const std::filesystem::path& path, const CsvSchema& schema,
                     Category category) {
  if (schema.id_column == schema.text_column) {
    throw CsvError(CsvError::Kind::MissingColumn,
                   "id and text columns must be distinct (both '" + schema.id_column + "')");
  }
  const std::string text = read_text_file(path);
  const auto rows = parse_csv(text);
  if (rows.empty()) {
    throw CsvError(CsvError::Kind::Malformed, "empty CSV file: " + path.string());
  }

  const auto& header = rows.front();
  const std::size_t id_col = find_column(header, schema.id_column, path);
  const std::size_t text_col = find_column(header, schema.text_column, path);
  std::vector<std::pair<std::size_t, LabelSource>> label_cols;
  for (const auto& [name, source] : schema.label_columns) {
    label_cols.emplace_back(find_column(header, name, path), source);
  }

  Dataset dataset;
  dataset.items.reserve(rows.size() - 1);
  std::unordered_set<std::string> seen_ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto cell = [&](std::size_t col) -> std::string_view {
      return col < row.size() ? std::string_view(row[col]) : std::string_view();
    };

    AnnotatedItem item;
    item.id = std::string(cell(id_col));
    item.text = std::string(cell(text_col));
    item.category = category;

    if (item.id.empty()) {
      throw CsvError(CsvError::Kind::Malformed,
                     "empty id at row " + std::to_string(r + 1) + " of " + path.string());
    }
    if (!seen_ids.insert(item.id).second) {
      throw CsvError(CsvError::Kind::DuplicateId,
                     "duplicate id '" + item.id + "' at row " + std::to_string(r + 1) +
                         " of " + path.string());
    }
    if (trim(item.text).empty()) {
      throw CsvError(CsvError::Kind::Malformed,
                     "empty text for id '" + item.id + "' at row " + std::to_string(r + 1));
    }
    if (!is_valid_utf8(item.text)) {
      throw CsvError(CsvError::Kind::Encoding,
                     "text for id '" + item.id + "' is not valid UTF-8 (row " +
                         std::to_string(r + 1) + ")");
    }

    for (const auto& [col, source] : label_cols) {
      const std::string_view body = cell(col);
      if (trim(body).empty()) continue;  // unset slot
      const auto label = parse_label_cell(body);
      if (!label) {
        throw CsvError(CsvError::Kind::BadLabelCell,
                       "bad label cell '" + std::string(body) + "' at row " +
                           std::to_string(r + 1) + ", column '" + header[col] + "'");
      }
      item.labels[source] = *label;
    }
    dataset.items.push_back(std::move(item));
  }
  return dataset;
}

void write_labels(const Dataset& dataset, const LabelSource& source,
                  const std::filesystem::path& path) {
  std::vector<std::string> missing;
  for (const auto& item : dataset.items) {
    if (!item.label_for(source)) missing.push_back(item.id);
  }
  if (!missing.empty()) {
    std::string detail = "items missing a '" + source_key(source) + "' label:";
    for (const auto& id : missing) detail += " " + id;
    throw CsvError(CsvError::Kind::MissingLabel, detail);
  }

  std::vector<std::pair<std::string, Label>> rows;
  rows.reserve(dataset.items.size());
  for (const auto& item : dataset.items) {
    rows.emplace_back(item.id, *item.label_for(source));
  }
  write_label_csv(rows, path);
}

std::vector<std::pair<std::string, Label>> load_label_csv(const std::filesystem::path& path) {
  const auto rows = parse_csv(read_text_file(path));
  if (rows.empty()) {
    throw CsvError(CsvError::Kind::Malformed, "empty label file: " + path.string());
  }
  if (rows.front().size() < 2 || rows.front()[0] != "id" || rows.front()[1] != "label") {
    throw CsvError(CsvError::Kind::MissingColumn,
                   "expected 'id,label' header in " + path.string());
  }

  std::vector<std::pair<std::string, Label>> out;
  out.reserve(rows.size() - 1);
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() < 2 || row[0].empty()) {
      throw CsvError(CsvError::Kind::Malformed,
                     "bad row " + std::to_string(r + 1) + " in " + path.string());
    }
    if (!seen.insert(row[0]).second) {
      throw CsvError(CsvError::Kind::DuplicateId,
                     "duplicate id '" + row[0] + "' in " + path.string());
    }
    const auto label = parse_label_cell(row[1]);
    if (!label) {
      throw CsvError(CsvError::Kind::BadLabelCell,
                     "bad label '" + row[1] + "' at row " + std::to_string(r + 1) + " in " +
                         path.string());
    }
    out.emplace_back(row[0], *label);
  }
  return out;
}

void write_label_csv(const std::vector<std::pair<std::string, Label>>& rows,
                     const std::filesystem::path& path) {
  std::string body = "id,label\n";
  for (const auto& [id, label] : rows) {
    body += render_csv_row({id, label_text(label)});
  }
  write_text_file_atomic(path, body);
}

}  // namespace labelkit
