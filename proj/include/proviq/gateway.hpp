#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "proviq/geometry.hpp"

namespace proviq {

enum class Capability {
  ImageQA,
  Detect,
  CaptionImage,
  CaptionVideoChunk,
  Transcribe,
  LLMComplete,
};

inline constexpr Capability kAllCapabilities[] = {
    Capability::ImageQA,           Capability::Detect,     Capability::CaptionImage,
    Capability::CaptionVideoChunk, Capability::Transcribe, Capability::LLMComplete,
};

const char* to_string(Capability cap) noexcept;
Capability parse_capability(std::string_view name);

struct CapabilityRequest {
  Capability capability = Capability::ImageQA;
  std::string video_id;
  std::int64_t frame = 0;                 // single-frame capabilities
  std::int64_t chunk_start = 0;           // CaptionVideoChunk, half-open
  std::int64_t chunk_end = 0;
  std::string text;                       // question, object query or prompt
  std::optional<Box> region;              // crop bounds for find()-derived queries
  int max_tokens = 0;                     // LLMComplete
  double temperature = 0.0;               // LLMComplete

  /// Only the fields meaningful for the capability, with sorted keys.
  nlohmann::json canonical() const;
  /// SHA-256 of the canonical serialization; independent of construction order.
  std::string request_id() const;
  /// Short human-readable summary for traces.
  std::string summary() const;
};

struct CapabilityResponse {
  Capability capability = Capability::ImageQA;
  std::string text;              // answer / caption / transcript / completion
  std::vector<ScoredBox> boxes;  // Detect

  nlohmann::json to_json() const;
  /// Validates the schema (box ordering, score range); throws MalformedResponse.
  static CapabilityResponse from_json(Capability cap, const nlohmann::json& j);
  friend bool operator==(const CapabilityResponse&, const CapabilityResponse&) = default;
};

/// One visual/language capability provider. Implementations must be thread-safe.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual bool supports(Capability cap) const = 0;
  virtual CapabilityResponse call(const CapabilityRequest& request) = 0;
  /// Identifies the configuration; part of every cache key.
  virtual std::string fingerprint() const = 0;
};

struct CallRecord {
  Capability capability;
  std::string request_id;
  std::string summary;
  bool cached = false;
  bool failed = false;
  std::string error;
};

/// Per-execution call log and backend-call budget. Thread-safe.
class CallLog {
 public:
  explicit CallLog(std::optional<std::size_t> limit = std::nullopt) : limit_(limit) {}

  /// Claims `n` calls against the budget; throws BudgetExceeded if that would exceed it.
  void reserve(std::size_t n);
  void record(CallRecord rec);
  /// Removes and returns everything recorded since the last drain.
  std::vector<CallRecord> drain();
  std::size_t total() const;

 private:
  mutable std::mutex mu_;
  std::optional<std::size_t> limit_;
  std::size_t reserved_ = 0;
  std::vector<CallRecord> pending_;
};

/// Append-only JSON-lines response cache keyed by backend fingerprint + request_id.
class ResponseCache {
 public:
  ResponseCache() = default;  // in-memory only
  explicit ResponseCache(std::filesystem::path file);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& request_id, const std::string& value);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::optional<std::filesystem::path> file_;
  std::unordered_map<std::string, std::string> entries_;
};

struct CallOutcome {
  std::optional<CapabilityResponse> response;
  std::exception_ptr error;
};

struct GatewayOptions {
  std::size_t max_concurrency = 8;
};

/// Routes capability requests to backends with caching and a global in-flight limit.
class Gateway {
 public:
  explicit Gateway(GatewayOptions options = {});

  /// Registers `backend` for every capability it supports (later registrations win).
  void add_backend(std::shared_ptr<Backend> backend);
  void set_backend(Capability cap, std::shared_ptr<Backend> backend);
  void set_cache(std::shared_ptr<ResponseCache> cache);

  bool supports(Capability cap) const;

  CapabilityResponse call(const CapabilityRequest& request, CallLog* log = nullptr);

  /// Issues requests concurrently (bounded) and returns responses in request order.
  /// The first failure, in request order, is rethrown after all calls finish.
  std::vector<CapabilityResponse> call_all(const std::vector<CapabilityRequest>& requests,
                                           CallLog* log = nullptr);

  /// Like call_all but reports failures per request instead of throwing.
  std::vector<CallOutcome> call_settled(const std::vector<CapabilityRequest>& requests,
                                        CallLog* log = nullptr);

  /// Calls that reached a backend (cache hits excluded).
  std::size_t backend_calls() const noexcept { return backend_calls_.load(); }
  std::size_t max_concurrency() const noexcept { return options_.max_concurrency; }

 private:
  CapabilityResponse call_one(const CapabilityRequest& request, CallRecord& rec);
  std::shared_ptr<Backend> backend_for(Capability cap) const;

  class Slots {
   public:
    explicit Slots(std::size_t n) : free_(n) {}
    void acquire();
    void release();

   private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::size_t free_;
  };

  GatewayOptions options_;
  mutable std::mutex mu_;
  std::map<Capability, std::shared_ptr<Backend>> backends_;
  std::shared_ptr<ResponseCache> cache_;
  std::unique_ptr<Slots> slots_;
  std::atomic<std::size_t> backend_calls_{0};
};

// ---------------------------------------------------------------------------
// HTTP/JSON wire protocol

/// Endpoint path for a capability, e.g. "/v1/image_qa".
std::string wire_path(Capability cap);
nlohmann::json wire_request_body(const CapabilityRequest& request);
CapabilityRequest parse_wire_request(Capability cap, const nlohmann::json& body);
nlohmann::json wire_response_body(const CapabilityResponse& response);
/// Throws MalformedResponse on schema violations.
CapabilityResponse parse_wire_response(Capability cap, const nlohmann::json& body);

struct RemoteOptions {
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  std::string bearer_token;
  double timeout_s = 120;
  std::map<Capability, std::string> base_url_overrides;
};

/// Backend speaking the wire protocol over HTTP.
class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(RemoteOptions options);
  bool supports(Capability cap) const override;
  CapabilityResponse call(const CapabilityRequest& request) override;
  std::string fingerprint() const override;

 private:
  RemoteOptions options_;
};

}  // namespace proviq
