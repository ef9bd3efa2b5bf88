#include <random>

#include <doctest.h>

#include "labelkit/io.hpp"
#include "labelkit/prompting.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace labelkit;
using testsupport::TempDir;

namespace {

AnnotatedItem item(std::string id, std::string text) {
  AnnotatedItem out;
  out.id = std::move(id);
  out.text = std::move(text);
  out.category = Category::PhysicalActivity;
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("prompting");

TEST_CASE("load_header keeps the body and appends the fixed contract") {
  TempDir dir("prompt");
  const std::string rules = "Label tweets about physical activity.\nRule 1: ...\n";
  write_text_file_atomic(dir.file("pa.txt"), rules);

  const PromptHeader header = load_header(dir.file("pa.txt"), Category::PhysicalActivity);
  CHECK(header.rules_text == rules);
  CHECK(header.format_contract == kFormatContract);
  CHECK(header.category == Category::PhysicalActivity);
}

TEST_CASE("empty or whitespace-only header files are rejected") {
  TempDir dir("prompt");
  write_text_file_atomic(dir.file("empty.txt"), "");
  write_text_file_atomic(dir.file("blank.txt"), " \n\t\n");
  for (const char* name : {"empty.txt", "blank.txt"}) {
    try {
      load_header(dir.file(name), Category::SleepProblems);
      FAIL("expected PromptError");
    } catch (const PromptError& err) {
      CHECK(err.kind == PromptError::Kind::EmptyHeader);
    }
  }
  CHECK_THROWS_AS(load_header(dir.file("missing.txt"), Category::SleepProblems), IoError);
}

TEST_CASE("build_prompt renders one tab-separated line per item, in order") {
  PromptHeader header;
  header.rules_text = "rules";
  const PromptText prompt = build_prompt(header, {item("a", "ran 5k"), item("b", "so tired")});

  CHECK(prompt.item_ids == std::vector<std::string>{"a", "b"});
  const auto pos_a = prompt.rendered.find("a\tran 5k\n");
  const auto pos_b = prompt.rendered.find("b\tso tired\n");
  REQUIRE(pos_a != std::string::npos);
  REQUIRE(pos_b != std::string::npos);
  CHECK(pos_a < pos_b);

  // The contract appears exactly once.
  const auto first = prompt.rendered.find(kFormatContract);
  REQUIRE(first != std::string::npos);
  CHECK(prompt.rendered.find(kFormatContract, first + 1) == std::string::npos);
}

TEST_CASE("item text newlines are escaped so one item stays one line") {
  PromptHeader header;
  header.rules_text = "rules";
  const PromptText prompt = build_prompt(header, {item("a", "line1\nline2\r")});
  CHECK(prompt.rendered.find("a\tline1\\nline2\\r\n") != std::string::npos);

  CHECK(escape_item_text("back\\slash") == "back\\\\slash");
  CHECK(escape_item_text("") == "");
}

TEST_CASE("rendering is deterministic and header-sensitive") {
  PromptHeader pa;
  pa.rules_text = "physical";
  PromptHeader sleep;
  sleep.rules_text = "sleep";
  const std::vector<AnnotatedItem> batch{item("a", "text a"), item("b", "text b")};

  CHECK(build_prompt(pa, batch).rendered == build_prompt(pa, batch).rendered);
  CHECK(build_prompt(pa, batch).rendered != build_prompt(sleep, batch).rendered);
}

TEST_CASE("duplicate and malformed batch ids are rejected") {
  PromptHeader header;
  header.rules_text = "rules";
  try {
    build_prompt(header, {item("a", "x"), item("a", "y")});
    FAIL("expected PromptError");
  } catch (const PromptError& err) {
    CHECK(err.kind == PromptError::Kind::DuplicateIdInBatch);
  }
  try {
    build_prompt(header, {item("a\tb", "x")});
    FAIL("expected PromptError");
  } catch (const PromptError& err) {
    CHECK(err.kind == PromptError::Kind::BadItemId);
  }
  CHECK_THROWS_AS(build_prompt(header, {}), Error);
}

TEST_CASE("prompt-side round trip recovers (id, escaped text) pairs") {
  PromptHeader header;
  header.rules_text = "Some rules.\nItems:\nnot the real marker above";
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<AnnotatedItem> batch;
    const std::size_t n = 1 + rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      std::string text = testsupport::random_tweet(rng);
      if (rng() % 4 == 0) text += "\nsecond line";
      if (rng() % 8 == 0) text += "\ttabbed";
      batch.push_back(item("id" + std::to_string(i), text));
    }
    const PromptText prompt = build_prompt(header, batch);
    const auto parsed = parse_prompt_items(prompt.rendered);
    REQUIRE(parsed.size() == batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      CHECK(parsed[i].first == batch[i].id);
      CHECK(parsed[i].second == escape_item_text(batch[i].text));
    }
  }
}

TEST_SUITE_END();
