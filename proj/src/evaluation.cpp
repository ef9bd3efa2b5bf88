#include "labelkit/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>

#include "labelkit/csv.hpp"

namespace labelkit {

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += " ";
    out += id;
  }
  return out;
}

void require_same_ids(const LabelMap& pred, const LabelMap& gold) {
  std::vector<std::string> only_pred;
  std::vector<std::string> only_gold;
  for (const auto& [id, label] : pred) {
    (void)label;
    if (!gold.contains(id)) only_pred.push_back(id);
  }
  for (const auto& [id, label] : gold) {
    (void)label;
    if (!pred.contains(id)) only_gold.push_back(id);
  }
  if (!only_pred.empty() || !only_gold.empty()) {
    throw IdMismatchError(std::move(only_pred), std::move(only_gold));
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

IdMismatchError::IdMismatchError(std::vector<std::string> only_pred_,
                                 std::vector<std::string> only_gold_)
    : Error("prediction/gold id sets differ; only in pred: [" + join_ids(only_pred_) +
            "], only in gold: [" + join_ids(only_gold_) + "]"),
      only_pred(std::move(only_pred_)),
      only_gold(std::move(only_gold_)) {}

void ConfusionMatrix::add(Label actual, Label predicted, std::int64_t n) {
  counts_[label_index(actual)][label_index(predicted)] += n;
}

std::int64_t ConfusionMatrix::at(Label actual, Label predicted) const {
  return counts_[label_index(actual)][label_index(predicted)];
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t sum = 0;
  for (const auto& row : counts_) {
    for (std::int64_t cell : row) sum += cell;
  }
  return sum;
}

std::int64_t ConfusionMatrix::row_sum(Label actual) const {
  std::int64_t sum = 0;
  for (std::int64_t cell : counts_[label_index(actual)]) sum += cell;
  return sum;
}

std::int64_t ConfusionMatrix::col_sum(Label predicted) const {
  std::int64_t sum = 0;
  for (const auto& row : counts_) sum += row[label_index(predicted)];
  return sum;
}

std::int64_t ConfusionMatrix::diagonal() const {
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < 3; ++i) sum += counts_[i][i];
  return sum;
}

double percent_2dp(std::int64_t count, std::int64_t total) {
  if (total <= 0) throw std::invalid_argument("percent of an empty total");
  if (count < 0) throw std::invalid_argument("negative count");
  // Hundredths of a percent, half-up: round(count * 10000 / total).
  const std::int64_t hundredths = (count * 10000 + total / 2) / total;
  return static_cast<double>(hundredths) / 100.0;
}

double ConfusionMatrix::cell_percent(Label actual, Label predicted) const {
  return percent_2dp(at(actual, predicted), total());
}

double accuracy(const LabelMap& pred, const LabelMap& gold) {
  require_same_ids(pred, gold);
  if (gold.empty()) throw Error("accuracy over an empty id set");
  std::int64_t correct = 0;
  for (const auto& [id, actual] : gold) {
    if (pred.at(id) == actual) correct++;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

ConfusionMatrix confusion(const LabelMap& pred, const LabelMap& gold) {
  require_same_ids(pred, gold);
  ConfusionMatrix matrix;
  for (const auto& [id, actual] : gold) {
    matrix.add(actual, pred.at(id));
  }
  return matrix;
}

std::map<Label, ClassMetrics> per_class_metrics(const ConfusionMatrix& matrix) {
  std::map<Label, ClassMetrics> out;
  for (Label label : kAllLabels) {
    ClassMetrics metrics;
    const std::int64_t hit = matrix.at(label, label);
    const std::int64_t col = matrix.col_sum(label);
    const std::int64_t row = matrix.row_sum(label);
    if (col > 0) metrics.precision = static_cast<double>(hit) / static_cast<double>(col);
    if (row > 0) metrics.recall = static_cast<double>(hit) / static_cast<double>(row);
    out[label] = metrics;
  }
  return out;
}

double Comparison::accuracy_pct() const {
  const std::int64_t n = confusion.total();
  return n > 0 ? percent_2dp(confusion.diagonal(), n) : 0.0;
}

Comparison compare(const LabelMap& pred, const LabelMap& gold) {
  Comparison out;
  out.accuracy = accuracy(pred, gold);
  out.confusion = confusion(pred, gold);
  out.per_class = per_class_metrics(out.confusion);
  return out;
}

double EvalReport::total_accuracy_pct() const {
  std::int64_t diag = 0;
  std::int64_t total = 0;
  for (const auto& section : categories) {
    diag += section.pred_vs_gold.confusion.diagonal();
    total += section.pred_vs_gold.confusion.total();
  }
  return total > 0 ? percent_2dp(diag, total) : 0.0;
}

EvalReport build_report(const std::vector<LabeledSlice>& slices, const ReportOptions& options) {
  EvalReport report;
  std::int64_t diag = 0;
  std::int64_t total = 0;
  std::int64_t crowd_diag = 0;
  bool any_crowd = false;

  for (const auto& slice : slices) {
    CategorySection section;
    section.name = slice.name;
    section.n_items = slice.gold.size();
    section.pred_vs_gold = compare(slice.pred, slice.gold);
    diag += section.pred_vs_gold.confusion.diagonal();
    total += section.pred_vs_gold.confusion.total();
    if (slice.crowd) {
      section.crowd_vs_gold = compare(*slice.crowd, slice.gold);
      crowd_diag += section.crowd_vs_gold->confusion.diagonal();
      any_crowd = true;
    }
    report.categories.push_back(std::move(section));
  }

  if (total == 0) throw Error("cannot build a report from zero items");
  report.total_accuracy = static_cast<double>(diag) / static_cast<double>(total);
  if (any_crowd) {
    report.crowd_total_accuracy = static_cast<double>(crowd_diag) / static_cast<double>(total);
  }

  if (options.claimed_accuracy_pct) {
    ClaimCheck claim;
    claim.claimed_accuracy_pct = *options.claimed_accuracy_pct;
    claim.computed_accuracy_pct = report.total_accuracy_pct();
    claim.consistent =
        std::abs(claim.claimed_accuracy_pct - claim.computed_accuracy_pct) <= 0.005;
    report.claim = claim;
  }

  if (options.ledger) {
    report.wall_time_s = options.ledger->wall_time_s;
    if (options.price_in_per_1k && options.price_out_per_1k) {
      report.cost_usd =
          compute_cost(*options.ledger, *options.price_in_per_1k, *options.price_out_per_1k)
              .dollars();
    }
  }

  report.generated_at = utc_timestamp();
  return report;
}

EvalReport build_report(const std::vector<Dataset>& datasets, const LabelSource& pred,
                        const LabelSource& gold, const std::optional<LabelSource>& crowd,
                        const ReportOptions& options) {
  std::vector<LabeledSlice> slices;
  for (const auto& dataset : datasets) {
    if (dataset.items.empty()) continue;
    LabeledSlice slice;
    slice.name = category_key(dataset.items.front().category);
    if (crowd) slice.crowd.emplace();
    for (const auto& item : dataset.items) {
      const auto p = item.label_for(pred);
      const auto g = item.label_for(gold);
      if (!p || !g) {
        throw CsvError(CsvError::Kind::MissingLabel,
                       "item '" + item.id + "' lacks a " +
                           source_key(!p ? pred : gold) + " label");
      }
      slice.pred[item.id] = *p;
      slice.gold[item.id] = *g;
      if (crowd) {
        const auto c = item.label_for(*crowd);
        if (!c) {
          throw CsvError(CsvError::Kind::MissingLabel,
                         "item '" + item.id + "' lacks a " + source_key(*crowd) + " label");
        }
        (*slice.crowd)[item.id] = *c;
      }
    }
    slices.push_back(std::move(slice));
  }
  return build_report(slices, options);
}

namespace {

nlohmann::json matrix_to_json(const ConfusionMatrix& matrix) {
  nlohmann::json counts = nlohmann::json::array();
  nlohmann::json percent = nlohmann::json::array();
  nlohmann::json row_sums = nlohmann::json::array();
  nlohmann::json col_sums = nlohmann::json::array();
  for (Label actual : kAllLabels) {
    nlohmann::json count_row = nlohmann::json::array();
    nlohmann::json pct_row = nlohmann::json::array();
    for (Label predicted : kAllLabels) {
      count_row.push_back(matrix.at(actual, predicted));
      pct_row.push_back(matrix.cell_percent(actual, predicted));
    }
    counts.push_back(std::move(count_row));
    percent.push_back(std::move(pct_row));
    row_sums.push_back(matrix.row_sum(actual));
    col_sums.push_back(matrix.col_sum(actual));
  }
  return {{"labels", {"Yes", "No", "Unclear"}},
          {"counts", counts},
          {"percent", percent},
          {"row_sums", row_sums},
          {"col_sums", col_sums},
          {"total", matrix.total()}};
}

ConfusionMatrix matrix_from_json(const nlohmann::json& doc) {
  ConfusionMatrix matrix;
  const auto& counts = doc.at("counts");
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t p = 0; p < 3; ++p) {
      matrix.add(label_at(a), label_at(p), counts.at(a).at(p).get<std::int64_t>());
    }
  }
  return matrix;
}

nlohmann::json comparison_to_json(const Comparison& comparison) {
  nlohmann::json per_class;
  for (const auto& [label, metrics] : comparison.per_class) {
    nlohmann::json entry;
    entry["precision"] = metrics.precision ? nlohmann::json(*metrics.precision)
                                           : nlohmann::json(nullptr);
    entry["recall"] =
        metrics.recall ? nlohmann::json(*metrics.recall) : nlohmann::json(nullptr);
    per_class[label_text(label)] = std::move(entry);
  }
  return {{"accuracy", comparison.accuracy},
          {"accuracy_pct", comparison.accuracy_pct()},
          {"confusion", matrix_to_json(comparison.confusion)},
          {"per_class", per_class}};
}

Comparison comparison_from_json(const nlohmann::json& doc) {
  Comparison out;
  out.accuracy = doc.at("accuracy").get<double>();
  out.confusion = matrix_from_json(doc.at("confusion"));
  for (Label label : kAllLabels) {
    const auto& entry = doc.at("per_class").at(label_text(label));
    ClassMetrics metrics;
    if (!entry.at("precision").is_null()) metrics.precision = entry.at("precision").get<double>();
    if (!entry.at("recall").is_null()) metrics.recall = entry.at("recall").get<double>();
    out.per_class[label] = metrics;
  }
  return out;
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json categories;
  for (const auto& section : report.categories) {
    nlohmann::json entry = {{"n_items", section.n_items},
                            {"pred_vs_gold", comparison_to_json(section.pred_vs_gold)}};
    if (section.crowd_vs_gold) {
      entry["crowd_vs_gold"] = comparison_to_json(*section.crowd_vs_gold);
    }
    categories[section.name] = std::move(entry);
  }

  nlohmann::json doc = {
      {"categories", std::move(categories)},
      {"total_accuracy", report.total_accuracy},
      {"total_accuracy_pct", report.total_accuracy_pct()},
      {"cost_usd", report.cost_usd ? nlohmann::json(*report.cost_usd) : nlohmann::json(nullptr)},
      {"wall_time_s",
       report.wall_time_s ? nlohmann::json(*report.wall_time_s) : nlohmann::json(nullptr)},
      {"generated_at", report.generated_at},
  };
  if (report.crowd_total_accuracy) {
    doc["crowd_total_accuracy"] = *report.crowd_total_accuracy;
  }
  if (report.claim) {
    doc["claimed"] = {{"accuracy_pct", report.claim->claimed_accuracy_pct},
                      {"computed_pct", report.claim->computed_accuracy_pct},
                      {"consistent", report.claim->consistent}};
  }
  return doc;
}

EvalReport report_from_json(const nlohmann::json& doc) {
  EvalReport report;
  for (const auto& [name, entry] : doc.at("categories").items()) {
    CategorySection section;
    section.name = name;
    section.n_items = entry.at("n_items").get<std::size_t>();
    section.pred_vs_gold = comparison_from_json(entry.at("pred_vs_gold"));
    if (entry.contains("crowd_vs_gold")) {
      section.crowd_vs_gold = comparison_from_json(entry.at("crowd_vs_gold"));
    }
    report.categories.push_back(std::move(section));
  }
  report.total_accuracy = doc.at("total_accuracy").get<double>();
  if (doc.contains("crowd_total_accuracy")) {
    report.crowd_total_accuracy = doc.at("crowd_total_accuracy").get<double>();
  }
  if (doc.contains("claimed")) {
    ClaimCheck claim;
    claim.claimed_accuracy_pct = doc.at("claimed").at("accuracy_pct").get<double>();
    claim.computed_accuracy_pct = doc.at("claimed").at("computed_pct").get<double>();
    claim.consistent = doc.at("claimed").at("consistent").get<bool>();
    report.claim = claim;
  }
  if (!doc.at("cost_usd").is_null()) report.cost_usd = doc.at("cost_usd").get<double>();
  if (!doc.at("wall_time_s").is_null()) report.wall_time_s = doc.at("wall_time_s").get<double>();
  report.generated_at = doc.at("generated_at").get<std::string>();
  return report;
}

std::string matrix_csv(const ConfusionMatrix& matrix) {
  std::string out = ",Yes,No,Unclear\n";
  for (Label actual : kAllLabels) {
    out += label_text(actual);
    for (Label predicted : kAllLabels) {
      out += "," + std::to_string(matrix.at(actual, predicted));
    }
    out += "\n";
  }
  return out;
}

}  // namespace labelkit
