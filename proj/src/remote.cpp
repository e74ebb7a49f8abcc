#include <httplib.h>

#include "proviq/errors.hpp"
#include "proviq/gateway.hpp"
#include "proviq/text.hpp"

namespace proviq {

RemoteBackend::RemoteBackend(RemoteOptions options) : options_(std::move(options)) {
  if (options_.base_url.empty() && options_.base_url_overrides.empty()) {
    throw ConfigError("remote backend requires a base_url");
  }
}

bool RemoteBackend::supports(Capability cap) const {
  return !options_.base_url.empty() || options_.base_url_overrides.count(cap);
}

std::string RemoteBackend::fingerprint() const {
  std::string fp = "remote:" + options_.base_url;
  for (const auto& [cap, url] : options_.base_url_overrides) {
    fp += std::string(";") + to_string(cap) + "=" + url;
  }
  return text::sha256_hex(fp);
}

CapabilityResponse RemoteBackend::call(const CapabilityRequest& request) {
  auto it = options_.base_url_overrides.find(request.capability);
  const std::string& base = it != options_.base_url_overrides.end() ? it->second : options_.base_url;
  const std::string path = wire_path(request.capability);
  const std::string endpoint = base + path;

  // One client per call: httplib::Client is not safe for concurrent requests.
  httplib::Client client(base);
  const auto secs = static_cast<time_t>(options_.timeout_s);
  const auto usecs = static_cast<time_t>((options_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!options_.bearer_token.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.bearer_token);
  }
  auto res = client.Post(path, headers, wire_request_body(request).dump(), "application/json");
  if (!res) throw BackendUnavailable(endpoint, httplib::to_string(res.error()));

  nlohmann::json body;
  const bool parsed = [&] {
    try {
      body = nlohmann::json::parse(res->body);
      return true;
    } catch (const nlohmann::json::exception&) {
      return false;
    }
  }();
  if (res->status < 200 || res->status >= 300) {
    std::string cause = "HTTP " + std::to_string(res->status);
    if (parsed && body.is_object()) {
      cause += ": " + body.value("error", std::string("error"));
      if (body.contains("detail") && body["detail"].is_string()) {
        cause += ": " + body["detail"].get<std::string>();
      }
    }
    throw BackendUnavailable(endpoint, cause);
  }
  if (!parsed) throw MalformedResponse(endpoint + ": response is not JSON");
  try {
    return parse_wire_response(request.capability, body);
  } catch (const MalformedResponse& e) {
    throw MalformedResponse(endpoint + ": " + e.what());
  }
}

}  // namespace proviq
