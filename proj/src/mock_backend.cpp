#include <string_view>

#include "labelkit/backends.hpp"
#include "labelkit/batching.hpp"

namespace labelkit {

namespace {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t salt) {
  return splitmix64(splitmix64(splitmix64(a ^ salt) ^ b) ^ c);
}

// Uniform draw in [0,1) from a single 64-bit word.
double unit_draw(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace

Label MockBackend::policy_label(const std::string& id) const {
  const auto it = config_.policy.find(id);
  if (it != config_.policy.end()) return it->second;
  return label_at(fnv1a64(id) % 3);
}

ChatCompletion MockBackend::complete(const std::string& prompt, const BackendConfig&) {
  const std::uint64_t prompt_hash = fnv1a64(prompt);
  std::uint64_t attempt;
  {
    std::lock_guard lock(mu_);
    attempt = attempts_[prompt_hash]++;
  }

  if (unit_draw(mix(config_.seed, prompt_hash, attempt, 1)) <
      config_.transport_failure_probability) {
    throw TransportError("simulated transport failure");
  }

  const auto items = parse_prompt_items(prompt);
  std::string reply;
  for (const auto& [id, text] : items) {
    (void)text;
    Label label = policy_label(id);
    const std::uint64_t flip_word = mix(config_.seed, fnv1a64(id), attempt, 3);
    if (unit_draw(flip_word) < config_.flip_probability) {
      // Answer one of the two wrong labels, chosen by a second draw.
      const std::size_t correct = label_index(label);
      const std::size_t offset = 1 + (splitmix64(flip_word) & 1);
      label = label_at((correct + offset) % 3);
    }
    reply += id;
    reply.push_back(',');
    reply += label_text(label);
    reply.push_back('\n');
  }

  const std::uint64_t malform_word = mix(config_.seed, prompt_hash, attempt, 2);
  if (unit_draw(malform_word) < config_.malformed_probability && !items.empty()) {
    switch (splitmix64(malform_word) % 4) {
      case 0:
        reply = "Here are the labels you asked for\n" + reply;
        break;
      case 1: {  // drop the final line
        const auto cut = reply.rfind('\n', reply.size() - 2);
        reply = cut == std::string::npos ? std::string() : reply.substr(0, cut + 1);
        break;
      }
      case 2: {  // corrupt the first label
        const auto comma = reply.find(',');
        const auto eol = reply.find('\n');
        reply = reply.substr(0, comma + 1) + "Maybe" + reply.substr(eol);
        break;
      }
      case 3:  // repeat the first line
        reply += reply.substr(0, reply.find('\n') + 1);
        break;
    }
  }

  // Usage mimics a server-side exact count; the planning heuristic with its
  // safety factor stays above it.
  static const TokenEstimator exact = heuristic_estimator(1.0);
  ChatCompletion completion;
  completion.text = std::move(reply);
  completion.prompt_tokens = exact(prompt).tokens;
  completion.completion_tokens = exact(completion.text).tokens;
  return completion;
}

}  // namespace labelkit
