#include "labelkit/config.hpp"

#include <cmath>
#include <cstdlib>

#include <json.hpp>

#include "labelkit/io.hpp"

namespace labelkit {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& raw) {
  const std::filesystem::path p(raw);
  return p.is_absolute() ? p : base / p;
}

template <typename T>
void read_into(const json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& err) {
    throw ConfigError("cannot parse config " + path.string() + ": " + err.what());
  } catch (const IoError& err) {
    throw ConfigError(err.what());
  }

  const std::filesystem::path base = path.parent_path();
  RunConfig config;
  try {
    for (const auto& [key, entry] : doc.at("categories").items()) {
      const auto category = parse_category(key);
      if (!category) throw ConfigError("unknown category key '" + key + "'");
      CategoryConfig cat;
      cat.input_csv = resolve(base, entry.at("input_csv").get<std::string>());
      cat.header_file = resolve(base, entry.at("header_file").get<std::string>());
      cat.output_csv = resolve(base, entry.at("output_csv").get<std::string>());
      config.categories[*category] = std::move(cat);
    }
    if (config.categories.empty()) throw ConfigError("config lists no categories");

    if (doc.contains("schema")) {
      const auto& schema = doc.at("schema");
      read_into(schema, "id_column", config.schema.id_column);
      read_into(schema, "text_column", config.schema.text_column);
      if (schema.contains("label_columns")) {
        for (const auto& [column, source_name] : schema.at("label_columns").items()) {
          const auto source = parse_source(source_name.get<std::string>());
          if (!source) {
            throw ConfigError("bad label source '" + source_name.get<std::string>() +
                              "' for column '" + column + "'");
          }
          config.schema.label_columns[column] = *source;
        }
      }
    }

    if (doc.contains("backend")) {
      const auto& backend = doc.at("backend");
      read_into(backend, "endpoint_url", config.backend.endpoint_url);
      read_into(backend, "model_name", config.backend.model_name);
      read_into(backend, "temperature", config.backend.temperature);
      read_into(backend, "max_reply_tokens", config.backend.max_reply_tokens);
      read_into(backend, "api_key_env", config.backend.api_key_env);
      read_into(backend, "request_timeout_s", config.backend.request_timeout_s);
      read_into(backend, "max_attempts", config.backend.max_attempts);
      read_into(backend, "min_request_interval_ms", config.backend.min_request_interval_ms);
      read_into(backend, "parallelism", config.backend.parallelism);
    }

    if (doc.contains("batching")) {
      const auto& batching = doc.at("batching");
      read_into(batching, "budget_tokens", config.batching.budget_tokens);
      if (batching.contains("max_items")) {
        if (batching.at("max_items").is_null()) {
          config.batching.max_items.reset();
        } else {
          config.batching.max_items = batching.at("max_items").get<std::size_t>();
        }
      }
      read_into(batching, "safety_factor", config.batching.safety_factor);
    }

    read_into(doc, "runs", config.runs);

    if (doc.contains("prices")) {
      read_into(doc.at("prices"), "input_per_1k", config.prices.input_per_1k);
      read_into(doc.at("prices"), "output_per_1k", config.prices.output_per_1k);
    }

    if (doc.contains("mock")) {
      const auto& mock = doc.at("mock");
      read_into(mock, "seed", config.mock.mock.seed);
      read_into(mock, "malformed_probability", config.mock.mock.malformed_probability);
      read_into(mock, "transport_failure_probability",
                config.mock.mock.transport_failure_probability);
      read_into(mock, "flip_probability", config.mock.mock.flip_probability);
      if (mock.contains("policy_csv")) {
        config.mock.policy_csv = resolve(base, mock.at("policy_csv").get<std::string>());
      }
    }

    if (doc.contains("outputs")) {
      const auto& outputs = doc.at("outputs");
      if (outputs.contains("unlabeled_sidecar")) {
        config.outputs.unlabeled_sidecar =
            resolve(base, outputs.at("unlabeled_sidecar").get<std::string>());
      }
      if (outputs.contains("ledger_json")) {
        config.outputs.ledger_json =
            resolve(base, outputs.at("ledger_json").get<std::string>());
      }
    }
  } catch (const json::exception& err) {
    throw ConfigError("config " + path.string() + ": " + err.what());
  }
  return config;
}

void validate_run_config(const RunConfig& config, bool http_backend) {
  if (config.runs < 1 || config.runs % 2 == 0) {
    throw ConfigError("runs must be an odd positive integer, got " +
                      std::to_string(config.runs));
  }
  if (config.backend.max_attempts < 1) {
    throw ConfigError("backend.max_attempts must be >= 1");
  }
  if (!std::isfinite(config.backend.temperature) || config.backend.temperature < 0) {
    throw ConfigError("backend.temperature must be finite and >= 0");
  }
  if (config.batching.budget_tokens <= 0) {
    throw ConfigError("batching.budget_tokens must be positive");
  }
  for (const auto& [category, cat] : config.categories) {
    if (!std::filesystem::exists(cat.input_csv)) {
      throw ConfigError("input_csv for " + category_key(category) +
                        " does not exist: " + cat.input_csv.string());
    }
    if (!std::filesystem::exists(cat.header_file)) {
      throw ConfigError("header_file for " + category_key(category) +
                        " does not exist: " + cat.header_file.string());
    }
  }
  if (config.mock.policy_csv && !std::filesystem::exists(*config.mock.policy_csv)) {
    throw ConfigError("mock.policy_csv does not exist: " + config.mock.policy_csv->string());
  }
  if (http_backend) {
    if (config.backend.api_key_env.empty()) {
      throw ConfigError("backend.api_key_env must name an environment variable");
    }
    const char* key = std::getenv(config.backend.api_key_env.c_str());
    if (!key || !*key) {
      throw ConfigError("environment variable '" + config.backend.api_key_env +
                        "' is not set (required by the http backend)");
    }
  }
}

}  // namespace labelkit
