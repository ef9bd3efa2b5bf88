#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "labelkit/backends.hpp"
#include "labelkit/ingest.hpp"
#include "labelkit/llm_client.hpp"

namespace labelkit {

struct ConfigError : Error {
  using Error::Error;
};

struct CategoryConfig {
  std::filesystem::path input_csv;
  std::filesystem::path header_file;
  std::filesystem::path output_csv;
};

struct BatchingConfig {
  std::int64_t budget_tokens = 120000;
  std::optional<std::size_t> max_items = 1000;
  double safety_factor = kDefaultSafetyFactor;
};

struct PriceConfig {
  double input_per_1k = 0.01;
  double output_per_1k = 0.03;
};

struct MockSettings {
  MockConfig mock;
  std::optional<std::filesystem::path> policy_csv;
};

struct OutputConfig {
  std::optional<std::filesystem::path> unlabeled_sidecar;
  std::optional<std::filesystem::path> ledger_json;
};

// Declarative run description. Relative paths resolve against the config
// file's directory; the API secret is named here but read only from the
// environment.
struct RunConfig {
  std::map<Category, CategoryConfig> categories;
  CsvSchema schema;
  BackendConfig backend;
  BatchingConfig batching;
  int runs = 3;
  PriceConfig prices;
  MockSettings mock;
  OutputConfig outputs;
};

RunConfig load_run_config(const std::filesystem::path& path);

// Checks invariants that depend on the chosen backend: runs odd, referenced
// files exist, api_key_env set for the HTTP backend.
void validate_run_config(const RunConfig& config, bool http_backend);

}  // namespace labelkit
