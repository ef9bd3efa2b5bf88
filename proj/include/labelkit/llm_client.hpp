#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "labelkit/batching.hpp"
#include "labelkit/ingest.hpp"
#include "labelkit/parsing.hpp"
#include "labelkit/prompting.hpp"

namespace labelkit {

struct BackendConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4-turbo";
  double temperature = 0.0;
  std::int64_t max_reply_tokens = 4096;
  std::string api_key_env = "OPENAI_API_KEY";  // secret lives only in the environment
  double request_timeout_s = 120.0;
  int max_attempts = 5;
  std::int64_t min_request_interval_ms = 0;
  int parallelism = 1;  // concurrent batches within one run
};

struct ChatCompletion {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct TransportError : Error {
  using Error::Error;
};

// One chat-completion call. Implementations must be callable from multiple
// threads; failures surface as TransportError.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatCompletion complete(const std::string& prompt, const BackendConfig& config) = 0;
};

enum class ExchangeOutcome { Accepted, Rejected, TransportFailed };

std::string_view exchange_outcome_name(ExchangeOutcome outcome);

// One request/response round. Every attempt is recorded, including rejected
// and failed ones, so cost accounting covers resends.
struct LlmExchange {
  int batch_id = 0;
  int run = 1;
  int attempt = 1;  // 1-based, <= max_attempts
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t latency_ms = 0;
  ExchangeOutcome outcome = ExchangeOutcome::Accepted;
  std::string reason;  // rejection kind or transport message
};

struct RunLedger {
  std::vector<LlmExchange> exchanges;
  std::int64_t total_prompt_tokens = 0;
  std::int64_t total_completion_tokens = 0;
  double wall_time_s = 0.0;

  void append(const LlmExchange& exchange);  // keeps totals in sync
};

// Money in integer nanodollars, so cost is exactly linear in token counts
// and rounds to cents only at display time.
struct Usd {
  std::int64_t nanos = 0;

  double dollars() const { return static_cast<double>(nanos) / 1e9; }
  std::int64_t cents_rounded() const;
  std::string display() const;  // "$6.00"

  auto operator<=>(const Usd&) const = default;
};

// Prices are dollars per 1,000 tokens.
Usd compute_cost_tokens(std::int64_t prompt_tokens, std::int64_t completion_tokens,
                        double price_in_per_1k, double price_out_per_1k);
Usd compute_cost(const RunLedger& ledger, double price_in_per_1k, double price_out_per_1k);

// Minimum spacing between requests, shared across worker threads.
class RateLimiter {
 public:
  explicit RateLimiter(std::int64_t min_interval_ms) : min_interval_ms_(min_interval_ms) {}
  void acquire();

 private:
  std::int64_t min_interval_ms_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_allowed_{};
};

struct BatchOutcome {
  int batch_id = 0;
  std::map<std::string, Label> labels;  // empty when the batch failed
  std::vector<LlmExchange> exchanges;
  std::optional<std::string> failure;  // last reason after max_attempts
};

// Sends the prompt, validates the reply, and retries on rejection or
// transport error up to config.max_attempts. Ids of a failed batch are
// reported through BatchOutcome::failure, never dropped silently.
BatchOutcome submit_batch(ChatBackend& backend, const PromptText& prompt,
                          const BackendConfig& config, int batch_id = 0, int run = 1,
                          RateLimiter* limiter = nullptr);

struct LabelingResult {
  std::map<std::string, Label> labels;
  std::vector<std::string> unlabeled_ids;  // dataset order
  RunLedger ledger;
};

// Executes `runs` complete passes over the plan (runs sequential, batches
// within a run dispatched up to config.parallelism concurrently) and
// majority-votes per id. Ids with labels from at least ceil(runs/2) runs
// get a vote; the rest are reported unlabeled.
LabelingResult label_dataset(ChatBackend& backend, const Dataset& dataset,
                             const PromptHeader& header, const BatchPlan& plan, int runs,
                             const BackendConfig& config);

}  // namespace labelkit
