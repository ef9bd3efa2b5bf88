#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "labelkit/domain.hpp"

namespace labelkit {

struct TokenEstimate {
  std::int64_t tokens = 0;
};

using TokenEstimator = std::function<TokenEstimate(std::string_view)>;

inline constexpr double kDefaultSafetyFactor = 1.25;

// Bound on reply size: each item yields one short "id,label" line.
inline constexpr std::int64_t kReplyTokensPerItem = 10;

// ceil(bytes/4) scaled by safety_factor, rounded up. Monotone in length;
// empty string estimates 0. Pluggable so an exact tokenizer can replace it.
TokenEstimator heuristic_estimator(double safety_factor = kDefaultSafetyFactor);

struct Batch {
  int index = 0;
  std::vector<AnnotatedItem> items;
  std::int64_t item_tokens = 0;  // sum of per-item line estimates
};

struct BatchPlan {
  std::vector<Batch> batches;
  std::int64_t budget = 0;
  std::int64_t header_tokens = 0;
  std::optional<std::size_t> max_items;

  std::size_t total_items() const;
};

struct OversizeItemError : Error {
  OversizeItemError(std::string id, std::int64_t tokens);
  std::string id;
  std::int64_t tokens;
};

// Greedy first-fit in input order: a new batch starts when the next item
// would push the batch past the token budget or the item cap. Batches are
// disjoint and concatenate back to the input.
BatchPlan partition(const std::vector<AnnotatedItem>& items, std::int64_t header_tokens,
                    std::int64_t budget, std::optional<std::size_t> max_items,
                    const TokenEstimator& estimator = heuristic_estimator());

}  // namespace labelkit
