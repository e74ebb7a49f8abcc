#include "proviq/gateway.hpp"

#include <fstream>
#include <thread>

#include "proviq/errors.hpp"
#include "proviq/text.hpp"

namespace proviq {

using nlohmann::json;

const char* to_string(Capability cap) noexcept {
  switch (cap) {
    case Capability::ImageQA: return "IMAGE_QA";
    case Capability::Detect: return "DETECT";
    case Capability::CaptionImage: return "CAPTION_IMAGE";
    case Capability::CaptionVideoChunk: return "CAPTION_VIDEO_CHUNK";
    case Capability::Transcribe: return "TRANSCRIBE";
    case Capability::LLMComplete: return "LLM_COMPLETE";
  }
  return "UNKNOWN";
}

Capability parse_capability(std::string_view name) {
  std::string upper(name);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (auto cap : kAllCapabilities) {
    if (upper == to_string(cap)) return cap;
  }
  throw InvalidArgument("unknown capability: " + std::string(name));
}

namespace {

json box_json(const Box& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

}  // namespace

json CapabilityRequest::canonical() const {
  json j;
  j["capability"] = to_string(capability);
  switch (capability) {
    case Capability::ImageQA:
    case Capability::Detect:
    case Capability::CaptionImage:
      j["video_id"] = video_id;
      j["frame"] = frame;
      if (capability != Capability::CaptionImage) j["text"] = text;
      if (region) j["region"] = box_json(*region);
      break;
    case Capability::CaptionVideoChunk:
      j["video_id"] = video_id;
      j["start_frame"] = chunk_start;
      j["end_frame"] = chunk_end;
      break;
    case Capability::Transcribe:
      j["video_id"] = video_id;
      break;
    case Capability::LLMComplete:
      j["text"] = text;
      j["max_tokens"] = max_tokens;
      j["temperature"] = temperature;
      break;
  }
  return j;
}

std::string CapabilityRequest::request_id() const {
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  return text::sha256_hex(canonical().dump());
}

std::string CapabilityRequest::summary() const {
  std::string s = to_string(capability);
  switch (capability) {
    case Capability::ImageQA:
    case Capability::Detect:
      s += " frame=" + std::to_string(frame) + " '" + text + "'";
      if (region) s += " region";
      break;
    case Capability::CaptionImage:
      s += " frame=" + std::to_string(frame);
      break;
    case Capability::CaptionVideoChunk:
      s += " [" + std::to_string(chunk_start) + "," + std::to_string(chunk_end) + ")";
      break;
    case Capability::Transcribe:
      s += " " + video_id;
      break;
    case Capability::LLMComplete:
      s += " prompt=" + text::sha256_hex(text).substr(0, 12);
      break;
  }
  return s;
}

json CapabilityResponse::to_json() const {
  json j;
  j["capability"] = to_string(capability);
  if (capability == Capability::Detect) {
    j["boxes"] = json::array();
    for (const auto& b : boxes) {
      j["boxes"].push_back({{"x1", b.box.x1}, {"y1", b.box.y1}, {"x2", b.box.x2},
                            {"y2", b.box.y2}, {"score", b.score}});
    }
  } else {
    j["text"] = text;
  }
  return j;
}

namespace {

std::vector<ScoredBox> parse_boxes(const json& arr) {
  if (!arr.is_array()) throw MalformedResponse("boxes must be an array");
  std::vector<ScoredBox> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& b = arr[i];
    const std::string where = "boxes[" + std::to_string(i) + "]";
    for (const char* k : {"x1", "y1", "x2", "y2", "score"}) {
      if (!b.is_object() || !b.contains(k) || !b[k].is_number()) {
        throw MalformedResponse(where + "." + k + " missing or not a number");
      }
    }
    ScoredBox sb{{b["x1"].get<double>(), b["y1"].get<double>(), b["x2"].get<double>(),
                  b["y2"].get<double>()},
                 b["score"].get<double>()};
    if (!is_valid(sb.box)) throw MalformedResponse(where + ": invalid box (need x1<x2, y1<y2)");
    if (!is_normalized(sb.box)) throw MalformedResponse(where + ": coordinates outside [0,1]");
    if (sb.score < 0 || sb.score > 1) throw MalformedResponse(where + ": score outside [0,1]");
    out.push_back(sb);
  }
  return out;
}

std::string require_string(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
    throw MalformedResponse(std::string("missing string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

}  // namespace

CapabilityResponse CapabilityResponse::from_json(Capability cap, const json& j) {
  CapabilityResponse r;
  r.capability = cap;
  if (cap == Capability::Detect) {
    if (!j.is_object() || !j.contains("boxes")) throw MalformedResponse("missing 'boxes'");
    r.boxes = parse_boxes(j["boxes"]);
  } else {
    r.text = require_string(j, "text");
  }
  return r;
}

// ---------------------------------------------------------------------------

void CallLog::reserve(std::size_t n) {
  std::lock_guard lock(mu_);
  if (limit_ && reserved_ + n > *limit_) throw BudgetExceeded(BudgetKind::BackendCalls);
  reserved_ += n;
}

void CallLog::record(CallRecord rec) {
  std::lock_guard lock(mu_);
  pending_.push_back(std::move(rec));
}

std::vector<CallRecord> CallLog::drain() {
  std::lock_guard lock(mu_);
  return std::exchange(pending_, {});
}

std::size_t CallLog::total() const {
  std::lock_guard lock(mu_);
  return reserved_;
}

ResponseCache::ResponseCache(std::filesystem::path file) : file_(std::move(file)) {
  std::ifstream in(*file_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      entries_[j.at("key").get<std::string>()] = j.at("response").dump();
    } catch (const json::exception& e) {
      throw ConfigError("corrupt cache line " + std::to_string(lineno) + " in " +
                        file_->string() + ": " + e.what());
    }
  }
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& key, const std::string& request_id,
                        const std::string& value) {
  std::lock_guard lock(mu_);
  entries_[key] = value;  // identical keys carry identical values
  if (file_) {
    std::ofstream out(*file_, std::ios::app);
    json line{{"key", key}, {"request_id", request_id}, {"response", json::parse(value)}};
    out << line.dump() << '\n';
  }
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

// ---------------------------------------------------------------------------

void Gateway::Slots::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return free_ > 0; });
  --free_;
}

void Gateway::Slots::release() {
  {
    std::lock_guard lock(mu_);
    ++free_;
  }
  cv_.notify_one();
}

Gateway::Gateway(GatewayOptions options)
    : options_(options), slots_(std::make_unique<Slots>(std::max<std::size_t>(1, options.max_concurrency))) {
  options_.max_concurrency = std::max<std::size_t>(1, options_.max_concurrency);
}

void Gateway::add_backend(std::shared_ptr<Backend> backend) {
  std::lock_guard lock(mu_);
  for (auto cap : kAllCapabilities) {
    if (backend->supports(cap)) backends_[cap] = backend;
  }
}

void Gateway::set_backend(Capability cap, std::shared_ptr<Backend> backend) {
  std::lock_guard lock(mu_);
  backends_[cap] = std::move(backend);
}

void Gateway::set_cache(std::shared_ptr<ResponseCache> cache) {
  std::lock_guard lock(mu_);
  cache_ = std::move(cache);
}

bool Gateway::supports(Capability cap) const { return backend_for(cap) != nullptr; }

std::shared_ptr<Backend> Gateway::backend_for(Capability cap) const {
  std::lock_guard lock(mu_);
  auto it = backends_.find(cap);
  return it == backends_.end() ? nullptr : it->second;
}

CapabilityResponse Gateway::call_one(const CapabilityRequest& request, CallRecord& rec) {
  rec.capability = request.capability;
  rec.request_id = request.request_id();
  rec.summary = request.summary();
  try {
    auto backend = backend_for(request.capability);
    if (!backend) throw BackendUnavailable(to_string(request.capability), "no backend registered");
    std::shared_ptr<ResponseCache> cache;
    {
      std::lock_guard lock(mu_);
      cache = cache_;
    }
    const std::string key =
        cache ? text::sha256_hex(backend->fingerprint() + "\n" + rec.request_id) : std::string();
    if (cache) {
      if (auto hit = cache->get(key)) {
        rec.cached = true;
        return CapabilityResponse::from_json(request.capability, json::parse(*hit));
      }
    }
    slots_->acquire();
    CapabilityResponse response;
    try {
      response = backend->call(request);
    } catch (...) {
      slots_->release();
      ++backend_calls_;
      throw;
    }
    slots_->release();
    ++backend_calls_;
    response.capability = request.capability;
    // Round-trip through the serialized form so fresh and cached answers are identical.
    const std::string serialized = response.to_json().dump();
    if (cache) cache->put(key, rec.request_id, serialized);
    return CapabilityResponse::from_json(request.capability, json::parse(serialized));
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
    throw;
  }
}

CapabilityResponse Gateway::call(const CapabilityRequest& request, CallLog* log) {
  if (log) log->reserve(1);
  CallRecord rec;
  try {
    auto response = call_one(request, rec);
    if (log) log->record(std::move(rec));
    return response;
  } catch (...) {
    if (log) log->record(std::move(rec));
    throw;
  }
}

std::vector<CallOutcome> Gateway::call_settled(const std::vector<CapabilityRequest>& requests,
                                               CallLog* log) {
  if (log) log->reserve(requests.size());
  std::vector<CallOutcome> out(requests.size());
  // Logged afterwards in request order so traces do not depend on thread timing.
  std::vector<CallRecord> recs(requests.size());
  auto flush = [&] {
    if (log) {
      for (auto& r : recs) log->record(std::move(r));
    }
  };
  auto run = [&](std::size_t i) {
    try {
      out[i].response = call_one(requests[i], recs[i]);
    } catch (...) {
      out[i].error = std::current_exception();
    }
  };
  const std::size_t workers = std::min(options_.max_concurrency, requests.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < requests.size(); ++i) run(i);
    flush();
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < requests.size(); i = next++) run(i);
    });
  }
  for (auto& t : pool) t.join();
  flush();
  return out;
}

std::vector<CapabilityResponse> Gateway::call_all(const std::vector<CapabilityRequest>& requests,
                                                  CallLog* log) {
  auto outcomes = call_settled(requests, log);
  std::vector<CapabilityResponse> out;
  out.reserve(outcomes.size());
  for (auto& o : outcomes) {
    if (o.error) std::rethrow_exception(o.error);
    out.push_back(std::move(*o.response));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wire protocol

std::string wire_path(Capability cap) {
  switch (cap) {
    case Capability::ImageQA: return "/v1/image_qa";
    case Capability::Detect: return "/v1/detect";
    case Capability::CaptionImage: return "/v1/caption";
    case Capability::CaptionVideoChunk: return "/v1/video_caption";
    case Capability::Transcribe: return "/v1/transcribe";
    case Capability::LLMComplete: return "/v1/llm";
  }
  return "/v1/unknown";
}

json wire_request_body(const CapabilityRequest& r) {
  json j;
  switch (r.capability) {
    case Capability::ImageQA:
      j = {{"video_id", r.video_id}, {"frame", r.frame}, {"question", r.text}};
      break;
    case Capability::Detect:
      j = {{"video_id", r.video_id}, {"frame", r.frame}, {"query", r.text}};
      break;
    case Capability::CaptionImage:
      j = {{"video_id", r.video_id}, {"frame", r.frame}};
      break;
    case Capability::CaptionVideoChunk:
      j = {{"video_id", r.video_id}, {"start_frame", r.chunk_start}, {"end_frame", r.chunk_end}};
      break;
    case Capability::Transcribe:
      j = {{"video_id", r.video_id}};
      break;
    case Capability::LLMComplete:
      j = {{"prompt", r.text}, {"max_tokens", r.max_tokens}, {"temperature", r.temperature}};
      break;
  }
  if (r.region) j["box"] = box_json(*r.region);
  return j;
}

CapabilityRequest parse_wire_request(Capability cap, const json& b) {
  CapabilityRequest r;
  r.capability = cap;
  auto str = [&](const char* k) {
    if (!b.contains(k) || !b[k].is_string()) throw InvalidArgument(std::string("missing '") + k + "'");
    return b[k].get<std::string>();
  };
  auto num = [&](const char* k) {
    if (!b.contains(k) || !b[k].is_number_integer()) {
      throw InvalidArgument(std::string("missing integer '") + k + "'");
    }
    return b[k].get<std::int64_t>();
  };
  switch (cap) {
    case Capability::ImageQA: r.video_id = str("video_id"); r.frame = num("frame"); r.text = str("question"); break;
    case Capability::Detect: r.video_id = str("video_id"); r.frame = num("frame"); r.text = str("query"); break;
    case Capability::CaptionImage: r.video_id = str("video_id"); r.frame = num("frame"); break;
    case Capability::CaptionVideoChunk:
      r.video_id = str("video_id");
      r.chunk_start = num("start_frame");
      r.chunk_end = num("end_frame");
      break;
    case Capability::Transcribe: r.video_id = str("video_id"); break;
    case Capability::LLMComplete:
      r.text = str("prompt");
      r.max_tokens = static_cast<int>(b.value("max_tokens", 0));
      r.temperature = b.value("temperature", 0.0);
      break;
  }
  if (b.contains("box")) {
    const auto& bx = b["box"];
    if (!bx.is_array() || bx.size() != 4) throw InvalidArgument("'box' must be [x1,y1,x2,y2]");
    r.region = Box{bx[0].get<double>(), bx[1].get<double>(), bx[2].get<double>(), bx[3].get<double>()};
  }
  return r;
}

json wire_response_body(const CapabilityResponse& r) {
  switch (r.capability) {
    case Capability::ImageQA: return {{"answer", r.text}};
    case Capability::Detect: {
      json boxes = json::array();
      for (const auto& b : r.boxes) {
        boxes.push_back({{"x1", b.box.x1}, {"y1", b.box.y1}, {"x2", b.box.x2},
                         {"y2", b.box.y2}, {"score", b.score}});
      }
      return {{"boxes", boxes}};
    }
    case Capability::CaptionImage:
    case Capability::CaptionVideoChunk: return {{"caption", r.text}};
    case Capability::Transcribe:
    case Capability::LLMComplete: return {{"text", r.text}};
  }
  return json::object();
}

CapabilityResponse parse_wire_response(Capability cap, const json& body) {
  CapabilityResponse r;
  r.capability = cap;
  switch (cap) {
    case Capability::ImageQA: r.text = require_string(body, "answer"); break;
    case Capability::Detect:
      if (!body.is_object() || !body.contains("boxes")) throw MalformedResponse("missing 'boxes'");
      r.boxes = parse_boxes(body["boxes"]);
      break;
    case Capability::CaptionImage:
    case Capability::CaptionVideoChunk: r.text = require_string(body, "caption"); break;
    case Capability::Transcribe:
    case Capability::LLMComplete: r.text = require_string(body, "text"); break;
  }
  return r;
}

}  // namespace proviq
