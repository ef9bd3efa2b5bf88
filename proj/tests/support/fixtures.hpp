#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "labelkit/domain.hpp"

namespace testsupport {

using labelkit::Label;

// Reference confusion matrices used as evaluator fixtures, rows = actual
// (Yes, No, Unclear), columns = predicted.
inline constexpr std::array<std::array<std::int64_t, 3>, 3> kLlmCells = {{
    {356, 1826, 5},
    {415, 8222, 5},
    {115, 1053, 3},
}};
inline constexpr std::array<std::array<std::int64_t, 3>, 3> kCrowdCells = {{
    {1471, 696, 20},
    {1688, 6869, 85},
    {452, 689, 30},
}};

// Expected display percentages (half-up at 2 decimals) for the fixtures.
inline constexpr std::array<std::array<double, 3>, 3> kLlmPercent = {{
    {2.97, 15.22, 0.04},
    {3.46, 68.52, 0.04},
    {0.96, 8.78, 0.03},
}};
inline constexpr std::array<std::array<double, 3>, 3> kCrowdPercent = {{
    {12.26, 5.80, 0.17},
    {14.07, 57.24, 0.71},
    {3.77, 5.74, 0.25},
}};

struct ReferenceFixture {
  std::map<std::string, Label> gold;
  std::map<std::string, Label> llm;
  std::map<std::string, Label> crowd;
};

// Realizes both matrices over one shared gold standard, so the row sums
// (2187 / 8642 / 1171) coincide by construction.
inline ReferenceFixture build_reference_fixture() {
  ReferenceFixture fixture;
  int serial = 0;
  for (std::size_t actual = 0; actual < 3; ++actual) {
    std::vector<Label> llm_preds;
    std::vector<Label> crowd_preds;
    for (std::size_t pred = 0; pred < 3; ++pred) {
      llm_preds.insert(llm_preds.end(), static_cast<std::size_t>(kLlmCells[actual][pred]),
                       labelkit::label_at(pred));
      crowd_preds.insert(crowd_preds.end(), static_cast<std::size_t>(kCrowdCells[actual][pred]),
                       labelkit::label_at(pred));
    }
    for (std::size_t i = 0; i < llm_preds.size(); ++i) {
      char id[16];
      std::snprintf(id, sizeof(id), "t%06d", serial++);
      fixture.gold[id] = labelkit::label_at(actual);
      fixture.llm[id] = llm_preds[i];
      fixture.crowd[id] = crowd_preds[i];
    }
  }
  return fixture;
}

inline const std::vector<std::string>& sample_words() {
  static const std::vector<std::string> words = {
      "the",    "and",   "for",    "just",   "ran",     "walk",   "walked", "run",
      "gym",    "today", "sleep",  "tired",  "early",   "late",   "night",  "morning",
      "again",  "still", "really", "couch",  "sitting", "watch",  "series", "binge",
      "hours",  "week",  "daily",  "steps",  "bike",    "riding", "swim",   "yoga",
      "class",  "sore",  "legs",   "feel",   "great",   "awful",  "cannot", "wont",
      "going",  "gonna", "about",  "after",  "before",  "workout", "stretch", "nap",
      "awake",  "dream", "pills",  "coffee", "energy",  "lazy",   "desk",   "chair",
      "train",  "park",  "miles",  "finally", "skipped", "missed", "plan",  "goal"};
  return words;
}

// Tweet-like text: words from a small vocabulary, occasional punctuation,
// digits, and an emoji or two.
inline std::string random_tweet(std::mt19937_64& rng) {
  const auto& words = sample_words();
  static const std::vector<std::string> emoji = {"\U0001F3C3", "\U0001F634", "\U0001F4AA",
                                                 "\U0001F6CB"};
  std::uniform_int_distribution<std::size_t> word_count(5, 20);
  std::uniform_int_distribution<std::size_t> word_pick(0, words.size() - 1);
  std::uniform_int_distribution<int> percent(0, 99);

  std::string out;
  const std::size_t n = word_count(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.empty()) out += " ";
    const int roll = percent(rng);
    if (roll < 6) {
      out += std::to_string(rng() % 1000);
    } else if (roll < 12) {
      // gibberish token
      const std::size_t len = 4 + rng() % 6;
      for (std::size_t k = 0; k < len; ++k) out += static_cast<char>('a' + rng() % 26);
    } else {
      out += words[word_pick(rng)];
    }
    if (percent(rng) < 10) out += (percent(rng) < 50 ? "," : "!");
  }
  std::uniform_int_distribution<int> emoji_count(0, 2);
  const int m = emoji_count(rng);
  for (int i = 0; i < m; ++i) out += " " + emoji[rng() % emoji.size()];
  return out;
}

inline std::vector<labelkit::AnnotatedItem> random_items(std::mt19937_64& rng, std::size_t n,
                                                         labelkit::Category category) {
  std::vector<labelkit::AnnotatedItem> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    labelkit::AnnotatedItem item;
    item.id = "id" + std::to_string(i);
    item.text = random_tweet(rng);
    item.category = category;
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace testsupport
