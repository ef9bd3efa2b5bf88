#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "labelkit/domain.hpp"

namespace labelkit {

// Maps CSV columns onto item fields. Label columns are optional per row:
// a blank cell leaves that source slot unset.
struct CsvSchema {
  std::string id_column = "id";
  std::string text_column = "text";
  std::map<std::string, LabelSource> label_columns;
};

struct Dataset {
  std::vector<AnnotatedItem> items;

  std::map<Category, std::size_t> category_counts() const;
  std::vector<std::string> ids() const;
  const AnnotatedItem* find(const std::string& id) const;
};

// One AnnotatedItem per data row, in file order. Text bytes are preserved
// exactly as stored (after CSV unescaping); label cells accept canonical
// text in any casing or the integer codes 1 / -1 / 0.
Dataset load_dataset(const std::filesystem::path& path, const CsvSchema& schema,
                     Category category);

// Emits `id,label` rows in dataset order. Every item must carry a label
// from `source`; otherwise CsvError{MissingLabel} lists the unlabeled ids.
void write_labels(const Dataset& dataset, const LabelSource& source,
                  const std::filesystem::path& path);

// `id,label` files: the output side of write_labels and the input side of
// the vote and evaluate commands.
std::vector<std::pair<std::string, Label>> load_label_csv(const std::filesystem::path& path);
void write_label_csv(const std::vector<std::pair<std::string, Label>>& rows,
                     const std::filesystem::path& path);

}  // namespace labelkit
