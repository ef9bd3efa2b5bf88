#include <cmath>
#include <cstdlib>
#include <regex>

#include "labelkit/backends.hpp"

#include <httplib.h>
#include <json.hpp>

namespace labelkit {

namespace {

struct ParsedUrl {
  bool tls = false;
  std::string host;
  int port = 80;
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  static const std::regex pattern(R"((https?)://([^/:]+)(?::(\d+))?(/.*)?)");
  std::smatch match;
  if (!std::regex_match(url, match, pattern)) {
    throw Error("cannot parse endpoint url: " + url);
  }
  ParsedUrl out;
  out.tls = match[1] == "https";
  out.host = match[2];
  out.port = match[3].matched ? std::stoi(match[3]) : (out.tls ? 443 : 80);
  out.path = match[4].matched ? match[4].str() : "/v1/chat/completions";
  return out;
}

std::string api_key_from_env(const std::string& env_name) {
  if (env_name.empty()) return "";
  const char* value = std::getenv(env_name.c_str());
  if (!value || !*value) {
    throw Error("environment variable '" + env_name + "' is not set");
  }
  return value;
}

ChatCompletion parse_completion_body(const std::string& body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& err) {
    throw TransportError(std::string("unparseable response body: ") + err.what());
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    throw TransportError("response has no choices");
  }
  const auto& message = doc["choices"][0]["message"];
  if (!message.contains("content") || message["content"].is_null()) {
    throw TransportError("response choice has no content");
  }
  ChatCompletion completion;
  completion.text = message["content"].get<std::string>();
  if (doc.contains("usage") && doc["usage"].is_object()) {
    completion.prompt_tokens = doc["usage"].value("prompt_tokens", std::int64_t{0});
    completion.completion_tokens = doc["usage"].value("completion_tokens", std::int64_t{0});
  }
  return completion;
}

template <typename Client>
ChatCompletion post_completion(Client& client, const ParsedUrl& url,
                               const std::string& api_key, const std::string& prompt,
                               const BackendConfig& config) {
  const auto timeout_s = std::max(1, static_cast<int>(std::ceil(config.request_timeout_s)));
  client.set_connection_timeout(timeout_s, 0);
  client.set_read_timeout(timeout_s, 0);
  client.set_write_timeout(timeout_s, 0);

  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  const nlohmann::json body = {
      {"model", config.model_name},
      {"temperature", config.temperature},
      {"max_tokens", config.max_reply_tokens},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
  };

  auto result = client.Post(url.path, headers, body.dump(), "application/json");
  if (!result) {
    throw TransportError("request to " + url.host + " failed: " +
                         httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    std::string snippet = result->body.substr(0, 200);
    throw TransportError("HTTP " + std::to_string(result->status) + " from " + url.host +
                         ": " + snippet);
  }
  return parse_completion_body(result->body);
}

}  // namespace

ChatCompletion HttpBackend::complete(const std::string& prompt, const BackendConfig& config) {
  const ParsedUrl url = parse_url(config.endpoint_url);
  const std::string api_key = api_key_from_env(config.api_key_env);

  if (url.tls) {
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
    httplib::SSLClient client(url.host, url.port);
    return post_completion(client, url, api_key, prompt, config);
#else
    throw Error("https endpoint configured but TLS support is not compiled in");
#endif
  }
  httplib::Client client(url.host, url.port);
  return post_completion(client, url, api_key, prompt, config);
}

}  // namespace labelkit
