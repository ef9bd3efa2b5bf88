#include <random>

#include <doctest.h>

#include "labelkit/batching.hpp"
#include "labelkit/prompting.hpp"
#include "support/fixtures.hpp"
#include "support/reference_tokenizer.hpp"

using namespace labelkit;

namespace {

std::vector<AnnotatedItem> uniform_items(std::size_t n, const std::string& text) {
  std::vector<AnnotatedItem> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    AnnotatedItem item;
    item.id = "u" + std::to_string(i);
    item.text = text;
    item.category = Category::PhysicalActivity;
    items.push_back(std::move(item));
  }
  return items;
}

void check_plan_invariants(const BatchPlan& plan, const std::vector<AnnotatedItem>& input,
                           const TokenEstimator& estimator) {
  // Concatenation equals input: no loss, no duplication, no reorder.
  std::size_t cursor = 0;
  for (const auto& batch : plan.batches) {
    CHECK_FALSE(batch.items.empty());
    if (plan.max_items) CHECK(batch.items.size() <= *plan.max_items);
    std::int64_t recomputed = 0;
    for (const auto& item : batch.items) {
      REQUIRE(cursor < input.size());
      CHECK(item.id == input[cursor].id);
      recomputed += estimator(render_item_line(item)).tokens;
      cursor++;
    }
    CHECK(recomputed == batch.item_tokens);
    CHECK(plan.header_tokens + recomputed <= plan.budget);
  }
  CHECK(cursor == input.size());
}

}  // namespace

TEST_SUITE_BEGIN("batching");

TEST_CASE("heuristic estimator fixed points") {
  const TokenEstimator est = heuristic_estimator();
  CHECK(est("").tokens == 0);
  CHECK(est("abcd").tokens == 2);  // ceil(1 * 1.25) = 2
  CHECK(est("abcdefgh").tokens == 3);  // ceil(2 * 1.25)
  CHECK(est("a").tokens == 2);  // ceil(ceil(1/4) * 1.25)

  CHECK(heuristic_estimator(1.0)("abcd").tokens == 1);
  CHECK_THROWS_AS(heuristic_estimator(0.5), std::invalid_argument);
}

TEST_CASE("estimator is monotone under extension") {
  const TokenEstimator est = heuristic_estimator();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text = testsupport::random_tweet(rng);
    std::int64_t prev = est(text).tokens;
    for (int step = 0; step < 5; ++step) {
      text += static_cast<char>('a' + rng() % 26);
      const std::int64_t next = est(text).tokens;
      CHECK(next >= prev);
      prev = next;
    }
  }
}

TEST_CASE("heuristic stays at or above a reference tokenizer on a generated corpus") {
  const TokenEstimator est = heuristic_estimator();
  std::mt19937_64 rng(31337);
  for (int i = 0; i < 500; ++i) {
    const std::string tweet = testsupport::random_tweet(rng);
    const int reference = testsupport::reference_token_count(tweet);
    const std::int64_t heuristic = est(tweet).tokens;
    INFO("tweet: ", tweet, " reference: ", reference, " heuristic: ", heuristic);
    CHECK(heuristic >= reference);
  }
}

TEST_CASE("12,000 uniform items with max_items 1000 give 12 ordered batches") {
  const auto items = uniform_items(12000, "went for a morning run along the river");
  const TokenEstimator est = heuristic_estimator();
  const BatchPlan plan = partition(items, 500, 1'000'000, 1000, est);
  REQUIRE(plan.batches.size() == 12);
  for (const auto& batch : plan.batches) CHECK(batch.items.size() == 1000);
  check_plan_invariants(plan, items, est);
}

TEST_CASE("empty item list yields an empty plan") {
  const BatchPlan plan = partition({}, 100, 10'000, std::nullopt);
  CHECK(plan.batches.empty());
  CHECK(plan.total_items() == 0);
}

TEST_CASE("an item that cannot fit any batch is reported") {
  auto items = uniform_items(1, std::string(4000, 'x'));
  try {
    partition(items, 100, 200, std::nullopt);
    FAIL("expected OversizeItemError");
  } catch (const OversizeItemError& err) {
    CHECK(err.id == "u0");
  }
  CHECK_THROWS_AS(partition(items, 300, 200, std::nullopt), std::invalid_argument);
}

TEST_CASE("random datasets partition without loss, duplication, or reorder") {
  const TokenEstimator est = heuristic_estimator();
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = rng() % 400;
    const auto items =
        testsupport::random_items(rng, n, Category::SedentaryBehavior);
    const std::int64_t header_tokens = 50 + rng() % 200;
    const std::int64_t budget = header_tokens + 200 + rng() % 2000;
    std::optional<std::size_t> max_items;
    if (rng() % 2 == 0) max_items = 1 + rng() % 50;

    try {
      const BatchPlan plan = partition(items, header_tokens, budget, max_items, est);
      check_plan_invariants(plan, items, est);

      // Determinism.
      const BatchPlan again = partition(items, header_tokens, budget, max_items, est);
      REQUIRE(again.batches.size() == plan.batches.size());
      for (std::size_t i = 0; i < plan.batches.size(); ++i) {
        CHECK(again.batches[i].item_tokens == plan.batches[i].item_tokens);
        CHECK(again.batches[i].items.size() == plan.batches[i].items.size());
      }
    } catch (const OversizeItemError&) {
      // Legitimate when a random tweet alone beats a small random budget.
    }
  }
}

TEST_SUITE_END();
