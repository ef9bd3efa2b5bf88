#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "labelkit/ingest.hpp"
#include "labelkit/llm_client.hpp"

namespace labelkit {

using LabelMap = std::map<std::string, Label>;

struct IdMismatchError : Error {
  IdMismatchError(std::vector<std::string> only_pred, std::vector<std::string> only_gold);
  std::vector<std::string> only_pred;
  std::vector<std::string> only_gold;
};

// 3x3 counts indexed (actual, predicted) in the canonical Yes/No/Unclear
// order.
class ConfusionMatrix {
 public:
  void add(Label actual, Label predicted, std::int64_t n = 1);
  std::int64_t at(Label actual, Label predicted) const;
  std::int64_t total() const;
  std::int64_t row_sum(Label actual) const;
  std::int64_t col_sum(Label predicted) const;
  std::int64_t diagonal() const;

  // Percent of total, rounded half-up at 2 decimals (exact integer
  // arithmetic, no binary-float drift).
  double cell_percent(Label actual, Label predicted) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::array<std::array<std::int64_t, 3>, 3> counts_{};
};

// count/total as a percentage rounded half-up to 2 decimals.
double percent_2dp(std::int64_t count, std::int64_t total);

double accuracy(const LabelMap& pred, const LabelMap& gold);  // throws IdMismatchError
ConfusionMatrix confusion(const LabelMap& pred, const LabelMap& gold);

struct ClassMetrics {
  std::optional<double> precision;  // empty on 0/0, never coerced to 0
  std::optional<double> recall;
};

std::map<Label, ClassMetrics> per_class_metrics(const ConfusionMatrix& matrix);

struct Comparison {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::map<Label, ClassMetrics> per_class;

  double accuracy_pct() const;  // 2-decimal display value
};

Comparison compare(const LabelMap& pred, const LabelMap& gold);

struct CategorySection {
  std::string name;
  std::size_t n_items = 0;
  Comparison pred_vs_gold;
  std::optional<Comparison> crowd_vs_gold;
};

// Consistency check between an externally claimed accuracy and the one
// computed from the data. Inconsistencies are reported, never hidden.
struct ClaimCheck {
  double claimed_accuracy_pct = 0.0;
  double computed_accuracy_pct = 0.0;
  bool consistent = false;
};

struct EvalReport {
  std::vector<CategorySection> categories;
  double total_accuracy = 0.0;
  std::optional<double> crowd_total_accuracy;
  std::optional<ClaimCheck> claim;
  std::optional<double> cost_usd;
  std::optional<double> wall_time_s;
  std::string generated_at;

  double total_accuracy_pct() const;
};

// One evaluation slice: aligned label maps for a named portion of the data.
struct LabeledSlice {
  std::string name;
  LabelMap pred;
  LabelMap gold;
  std::optional<LabelMap> crowd;
};

struct ReportOptions {
  std::optional<double> claimed_accuracy_pct;
  const RunLedger* ledger = nullptr;
  std::optional<double> price_in_per_1k;
  std::optional<double> price_out_per_1k;
};

EvalReport build_report(const std::vector<LabeledSlice>& slices,
                        const ReportOptions& options = {});

// Dataset flavor: one dataset per category, labels pulled from the given
// source slots. Missing labels raise CsvError{MissingLabel}.
EvalReport build_report(const std::vector<Dataset>& datasets, const LabelSource& pred,
                        const LabelSource& gold,
                        const std::optional<LabelSource>& crowd = std::nullopt,
                        const ReportOptions& options = {});

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& doc);

// 3x3 dump with a header row/column of canonical label names.
std::string matrix_csv(const ConfusionMatrix& matrix);

}  // namespace labelkit
