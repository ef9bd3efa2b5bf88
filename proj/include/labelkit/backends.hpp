#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>

#include "labelkit/llm_client.hpp"

namespace labelkit {

// Speaks the OpenAI-compatible chat-completion JSON protocol: the prompt is
// sent as a single user message; the first choice's content and the usage
// token counts are consumed. The API key is read from the environment
// variable named in the config and never logged.
class HttpBackend : public ChatBackend {
 public:
  ChatCompletion complete(const std::string& prompt, const BackendConfig& config) override;
};

struct MockConfig {
  std::uint64_t seed = 0;
  std::map<std::string, Label> policy;  // id -> label; absent ids hash to a stable label
  double malformed_probability = 0.0;
  double transport_failure_probability = 0.0;
  double flip_probability = 0.0;  // chance per id per call of answering a wrong label
};

// Deterministic offline stand-in: identical seed and call sequence produce
// byte-identical replies. Randomness is derived from (seed, prompt, per-
// prompt attempt counter), so concurrent batches do not perturb each other.
class MockBackend : public ChatBackend {
 public:
  explicit MockBackend(MockConfig config) : config_(std::move(config)) {}

  ChatCompletion complete(const std::string& prompt, const BackendConfig& config) override;

  // The pre-noise label the mock answers for an id.
  Label policy_label(const std::string& id) const;

  const MockConfig& config() const { return config_; }

 private:
  MockConfig config_;
  std::mutex mu_;
  std::unordered_map<std::uint64_t, std::uint64_t> attempts_;  // prompt hash -> calls so far
};

}  // namespace labelkit
