#include "labelkit/llm_client.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace labelkit {

std::string_view exchange_outcome_name(ExchangeOutcome outcome) {
  switch (outcome) {
    case ExchangeOutcome::Accepted: return "Accepted";
    case ExchangeOutcome::Rejected: return "Rejected";
    case ExchangeOutcome::TransportFailed: return "TransportError";
  }
  return "Unknown";
}

void RunLedger::append(const LlmExchange& exchange) {
  exchanges.push_back(exchange);
  total_prompt_tokens += exchange.prompt_tokens;
  total_completion_tokens += exchange.completion_tokens;
}

std::int64_t Usd::cents_rounded() const {
  const std::int64_t nanos_per_cent = 10'000'000;
  if (nanos >= 0) return (nanos + nanos_per_cent / 2) / nanos_per_cent;
  return -((-nanos + nanos_per_cent / 2) / nanos_per_cent);
}

std::string Usd::display() const {
  const std::int64_t cents = cents_rounded();
  char buf[48];
  std::snprintf(buf, sizeof(buf), "$%lld.%02lld",
                static_cast<long long>(cents / 100),
                static_cast<long long>(cents < 0 ? -cents % 100 : cents % 100));
  return buf;
}

Usd compute_cost_tokens(std::int64_t prompt_tokens, std::int64_t completion_tokens,
                        double price_in_per_1k, double price_out_per_1k) {
  if (prompt_tokens < 0 || completion_tokens < 0) {
    throw std::invalid_argument("token counts must be nonnegative");
  }
  if (price_in_per_1k < 0 || price_out_per_1k < 0) {
    throw std::invalid_argument("prices must be nonnegative");
  }
  // Dollars per 1K tokens quantized to microdollars makes the per-token
  // price an exact integer number of nanodollars.
  const auto micro_in = static_cast<std::int64_t>(std::llround(price_in_per_1k * 1e6));
  const auto micro_out = static_cast<std::int64_t>(std::llround(price_out_per_1k * 1e6));
  return Usd{prompt_tokens * micro_in + completion_tokens * micro_out};
}

Usd compute_cost(const RunLedger& ledger, double price_in_per_1k, double price_out_per_1k) {
  return compute_cost_tokens(ledger.total_prompt_tokens, ledger.total_completion_tokens,
                             price_in_per_1k, price_out_per_1k);
}

void RateLimiter::acquire() {
  if (min_interval_ms_ <= 0) return;
  std::chrono::steady_clock::time_point wait_until;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    wait_until = next_allowed_ > now ? next_allowed_ : now;
    next_allowed_ = wait_until + std::chrono::milliseconds(min_interval_ms_);
  }
  std::this_thread::sleep_until(wait_until);
}

BatchOutcome submit_batch(ChatBackend& backend, const PromptText& prompt,
                          const BackendConfig& config, int batch_id, int run,
                          RateLimiter* limiter) {
  if (prompt.item_ids.empty()) throw Error("submit_batch: prompt has no items");
  if (config.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");

  BatchOutcome outcome;
  outcome.batch_id = batch_id;

  std::string last_reason;
  for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
    if (limiter) limiter->acquire();

    LlmExchange exchange;
    exchange.batch_id = batch_id;
    exchange.run = run;
    exchange.attempt = attempt;

    const auto start = std::chrono::steady_clock::now();
    try {
      const ChatCompletion completion = backend.complete(prompt.rendered, config);
      exchange.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - start)
                                .count();
      exchange.prompt_tokens = completion.prompt_tokens;
      exchange.completion_tokens = completion.completion_tokens;

      ParseResult parsed = parse_response(completion.text, prompt.item_ids);
      if (accepted(parsed)) {
        exchange.outcome = ExchangeOutcome::Accepted;
        outcome.exchanges.push_back(exchange);
        for (auto& [id, label] : std::get<ParsedReply>(parsed).records) {
          outcome.labels.emplace(std::move(id), label);
        }
        return outcome;
      }
      const auto& error = std::get<ValidationError>(parsed);
      exchange.outcome = ExchangeOutcome::Rejected;
      exchange.reason = std::string(validation_kind_name(error.kind)) + ": " + error.detail;
    } catch (const TransportError& err) {
      exchange.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - start)
                                .count();
      exchange.outcome = ExchangeOutcome::TransportFailed;
      exchange.reason = err.what();
    }

    last_reason = exchange.reason;
    outcome.exchanges.push_back(exchange);
    if (attempt < config.max_attempts && config.min_request_interval_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(config.min_request_interval_ms));
    }
  }

  outcome.failure = last_reason;
  return outcome;
}

LabelingResult label_dataset(ChatBackend& backend, const Dataset& dataset,
                             const PromptHeader& header, const BatchPlan& plan, int runs,
                             const BackendConfig& config) {
  if (runs < 1 || runs % 2 == 0) {
    throw std::invalid_argument("runs must be an odd positive integer");
  }

  const auto wall_start = std::chrono::steady_clock::now();

  // Prompts are per batch and identical across runs.
  std::vector<PromptText> prompts;
  prompts.reserve(plan.batches.size());
  for (const auto& batch : plan.batches) {
    prompts.push_back(build_prompt(header, batch.items));
  }

  RateLimiter limiter(config.min_request_interval_ms);
  const int workers =
      std::max(1, std::min(config.parallelism, static_cast<int>(plan.batches.size())));

  // votes[id] accumulates one label per successful run.
  std::map<std::string, std::vector<Label>> votes;
  for (const auto& item : dataset.items) votes[item.id];

  RunLedger ledger;
  std::mutex collect_mu;

  for (int run = 1; run <= runs; ++run) {
    std::vector<BatchOutcome> outcomes(plan.batches.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= plan.batches.size()) return;
        BatchOutcome outcome = submit_batch(backend, prompts[i], config,
                                            static_cast<int>(i), run, &limiter);
        std::lock_guard lock(collect_mu);
        outcomes[i] = std::move(outcome);
      }
    };
    if (workers == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(workers));
      for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    // Single-threaded reduction keyed by id: output is independent of
    // batch completion order.
    for (auto& outcome : outcomes) {
      for (const auto& exchange : outcome.exchanges) ledger.append(exchange);
      for (auto& [id, label] : outcome.labels) {
        const auto it = votes.find(id);
        if (it != votes.end()) it->second.push_back(label);
      }
    }
  }

  LabelingResult result;
  const std::size_t quorum = (static_cast<std::size_t>(runs) + 1) / 2;
  for (const auto& item : dataset.items) {
    const auto& item_votes = votes[item.id];
    if (item_votes.size() >= quorum) {
      result.labels[item.id] = vote_or_unclear(item_votes);
    } else {
      result.unlabeled_ids.push_back(item.id);
    }
  }

  ledger.wall_time_s = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - wall_start)
                           .count();
  result.ledger = std::move(ledger);
  return result;
}

}  // namespace labelkit
