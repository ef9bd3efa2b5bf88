#include "labelkit/batching.hpp"

#include <cmath>
#include <stdexcept>

#include "labelkit/prompting.hpp"

namespace labelkit {

TokenEstimator heuristic_estimator(double safety_factor) {
  if (!(safety_factor >= 1.0) || !std::isfinite(safety_factor)) {
    throw std::invalid_argument("safety factor must be finite and >= 1");
  }
  return [safety_factor](std::string_view text) {
    const auto bytes = static_cast<std::int64_t>(text.size());
    const std::int64_t base = (bytes + 3) / 4;
    const auto scaled = static_cast<std::int64_t>(
        std::ceil(static_cast<double>(base) * safety_factor));
    return TokenEstimate{scaled};
  };
}

std::size_t BatchPlan::total_items() const {
  std::size_t n = 0;
  for (const auto& batch : batches) n += batch.items.size();
  return n;
}

OversizeItemError::OversizeItemError(std::string id_, std::int64_t tokens_)
    : Error("item '" + id_ + "' alone exceeds the prompt budget (" +
            std::to_string(tokens_) + " tokens)"),
      id(std::move(id_)),
      tokens(tokens_) {}

BatchPlan partition(const std::vector<AnnotatedItem>& items, std::int64_t header_tokens,
                    std::int64_t budget, std::optional<std::size_t> max_items,
                    const TokenEstimator& estimator) {
  if (budget <= header_tokens) {
    throw std::invalid_argument("budget must exceed header tokens");
  }
  if (max_items && *max_items == 0) {
    throw std::invalid_argument("max_items must be positive when set");
  }

  BatchPlan plan;
  plan.budget = budget;
  plan.header_tokens = header_tokens;
  plan.max_items = max_items;

  const std::int64_t item_budget = budget - header_tokens;
  Batch current;
  auto flush = [&] {
    if (current.items.empty()) return;
    current.index = static_cast<int>(plan.batches.size());
    plan.batches.push_back(std::move(current));
    current = Batch{};
  };

  for (const auto& item : items) {
    const std::int64_t line_tokens = estimator(render_item_line(item)).tokens;
    if (line_tokens > item_budget) throw OversizeItemError(item.id, line_tokens);
    const bool over_tokens = current.item_tokens + line_tokens > item_budget;
    const bool over_count = max_items && current.items.size() >= *max_items;
    if (over_tokens || over_count) flush();
    current.items.push_back(item);
    current.item_tokens += line_tokens;
  }
  flush();
  return plan;
}

}  // namespace labelkit
