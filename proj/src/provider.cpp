#include <cmath>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "qconcept/counts.hpp"
#include "qconcept/error.hpp"

namespace qconcept::counts {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url, std::string_view phrase) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ProviderError("endpoint must look like http://host[:port][/path]", std::string(phrase), url);
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http") {
    throw ProviderError(fmt::format("unsupported scheme '{}'", scheme), std::string(phrase), url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (e.origin.size() <= scheme_end + 3) {
    throw ProviderError("endpoint has no host", std::string(phrase), url);
  }
  return e;
}

std::uint64_t parse_count_body(const std::string& body, std::string_view phrase, const std::string& endpoint) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw ProviderError("response body is not JSON", std::string(phrase), endpoint);
  }
  if (!doc.is_object() || !doc.contains("count")) {
    throw ProviderError("response has no \"count\" field", std::string(phrase), endpoint);
  }
  const auto& c = doc.at("count");
  if (c.is_number_unsigned()) return c.get<std::uint64_t>();
  if (c.is_number_integer() && c.get<std::int64_t>() >= 0) return c.get<std::uint64_t>();
  throw ProviderError(fmt::format("\"count\" is not a nonnegative integer: {}", c.dump()), std::string(phrase),
                      endpoint);
}

}  // namespace

std::string url_encode(std::string_view text) {
  std::string out;
  out.reserve(text.size() * 3);
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
        c == '.' || c == '~') {
      out.push_back(ch);
    } else {
      out += fmt::format("%{:02X}", c);
    }
  }
  return out;
}

std::uint64_t provider_count(const ProviderConfig& config, std::string_view phrase) {
  if (!(config.timeout_seconds > 0.0)) {
    throw ProviderError("timeout must be positive", std::string(phrase), config.endpoint);
  }
  const auto endpoint = split_endpoint(config.endpoint, phrase);

  httplib::Client client(endpoint.origin);
  const auto seconds = static_cast<time_t>(config.timeout_seconds);
  const auto micros = static_cast<time_t>(std::llround((config.timeout_seconds - static_cast<double>(seconds)) * 1e6));
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  const char sep = endpoint.path.find('?') == std::string::npos ? '?' : '&';
  const std::string target =
      fmt::format("{}{}{}={}", endpoint.path, sep, url_encode(config.query_param), url_encode(phrase));

  std::string last_failure;
  for (unsigned attempt = 0; attempt <= config.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50) * attempt);
    auto res = client.Get(target);
    if (!res) {
      last_failure = fmt::format("request failed: {}", httplib::to_string(res.error()));
      continue;
    }
    if (res->status >= 500 || res->status == 429) {
      last_failure = fmt::format("HTTP {}", res->status);
      continue;
    }
    if (res->status != 200) {
      throw ProviderError(fmt::format("HTTP {}", res->status), std::string(phrase), config.endpoint);
    }
    return parse_count_body(res->body, phrase, config.endpoint);
  }
  throw ProviderError(fmt::format("{} (after {} attempts)", last_failure, config.retries + 1), std::string(phrase),
                      config.endpoint);
}

}  // namespace qconcept::counts
