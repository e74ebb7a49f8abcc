#include "proviq/mock_world.hpp"

#include <fstream>
#include <random>

#include "proviq/errors.hpp"
#include "proviq/text.hpp"

namespace proviq {

using nlohmann::json;

namespace {

std::string ptr(const std::string& base, const std::string& key) { return base + "/" + key; }
std::string ptr(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

Box parse_box(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) throw SchemaError(where, "box must be [x1, y1, x2, y2]");
  for (const auto& v : j) {
    if (!v.is_number()) throw SchemaError(where, "box coordinates must be numbers");
  }
  Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!is_valid(b)) throw SchemaError(where, "invalid box (need x1 < x2 and y1 < y2)");
  if (!is_normalized(b)) throw SchemaError(where, "invalid box (coordinates outside [0, 1])");
  return b;
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaError(ptr(where, key), "required field missing");
  return obj[key];
}

std::map<std::string, std::string> parse_qa(const json& j, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where, "must be an object of question -> answer");
  std::map<std::string, std::string> out;
  for (const auto& [q, a] : j.items()) {
    if (!a.is_string()) throw SchemaError(ptr(where, q), "answer must be a string");
    out[text::canonical_phrase(q)] = a.get<std::string>();
  }
  return out;
}

MockFrame parse_frame(const json& f, std::size_t i) {
  const std::string where = ptr("/frames", i);
  if (!f.is_object()) throw SchemaError(where, "frame must be an object");
  if (f.contains("index") && f["index"] != static_cast<std::int64_t>(i)) {
    throw SchemaError(ptr(where, "index"), "frame entries must be listed in index order");
  }
  MockFrame frame;
  if (!f.contains("caption") || !f["caption"].is_string()) {
    throw SchemaError(ptr(where, "caption"), "frame " + std::to_string(i) + " has no caption");
  }
  frame.caption = f["caption"].get<std::string>();
  if (f.contains("objects")) {
    const auto& objs = f["objects"];
    if (!objs.is_object()) throw SchemaError(ptr(where, "objects"), "must be an object");
    for (const auto& [name, boxes] : objs.items()) {
      const std::string ow = ptr(ptr(where, "objects"), name);
      if (!boxes.is_array()) throw SchemaError(ow, "must be a list of detections");
      auto& list = frame.objects[text::canonical_phrase(name)];
      for (std::size_t k = 0; k < boxes.size(); ++k) {
        const std::string bw = ptr(ow, k);
        ScoredBox sb;
        sb.box = parse_box(require(boxes[k], "box", bw), ptr(bw, "box"));
        const auto& score = require(boxes[k], "score", bw);
        if (!score.is_number() || score.get<double>() < 0 || score.get<double>() > 1) {
          throw SchemaError(ptr(bw, "score"), "score must be in [0, 1]");
        }
        sb.score = score.get<double>();
        list.push_back(sb);
      }
    }
  }
  if (f.contains("predicates")) {
    const auto& preds = f["predicates"];
    if (!preds.is_object()) throw SchemaError(ptr(where, "predicates"), "must be an object");
    for (const auto& [q, v] : preds.items()) {
      if (!v.is_boolean()) throw SchemaError(ptr(ptr(where, "predicates"), q), "must be true/false");
      frame.predicates[text::canonical_phrase(q)] = v.get<bool>();
    }
  }
  if (f.contains("qa")) frame.qa = parse_qa(f["qa"], ptr(where, "qa"));
  if (f.contains("crop_qa")) {
    const auto& crops = f["crop_qa"];
    if (!crops.is_array()) throw SchemaError(ptr(where, "crop_qa"), "must be a list");
    for (std::size_t k = 0; k < crops.size(); ++k) {
      const std::string cw = ptr(ptr(where, "crop_qa"), k);
      CropQA c;
      c.box = parse_box(require(crops[k], "box", cw), ptr(cw, "box"));
      c.qa = parse_qa(require(crops[k], "qa", cw), ptr(cw, "qa"));
      frame.crop_qa.push_back(std::move(c));
    }
  }
  return frame;
}

// Every question declared on some frame must be answerable on every frame.
template <typename Map>
void check_total(const std::vector<MockFrame>& frames, Map MockFrame::*table, const char* name) {
  std::set<std::string> keys;
  for (const auto& f : frames) {
    for (const auto& [k, v] : f.*table) keys.insert(k);
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    for (const auto& k : keys) {
      if (!(frames[i].*table).count(k)) {
        throw SchemaError(ptr(ptr("/frames", i), name),
                          "frame " + std::to_string(i) + " has no entry for '" + k + "'");
      }
    }
  }
}

std::vector<std::pair<std::int64_t, std::int64_t>> one_second_chunks(const MockWorld& w) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  const auto k = ceil(Rational(w.frame_count) / w.fps);
  for (std::int64_t i = 0; i < k; ++i) {
    const auto s = floor(Rational(i) * w.fps);
    const auto e = std::min(w.frame_count, floor(Rational(i + 1) * w.fps));
    out.emplace_back(s, e);
  }
  return out;
}

std::string garble(const std::string& s) {
  auto words = text::tokenize(s);
  std::reverse(words.begin(), words.end());
  return "garbled: " + text::join(words, " ");
}

}  // namespace

std::shared_ptr<const SourceVideo> MockWorld::source() const {
  SourceVideo v;
  v.video_id = video_id;
  v.fps = fps;
  v.frame_count = frame_count;
  v.frame_source.kind = PayloadKind::Symbolic;
  return make_source(std::move(v));
}

MockWorld parse_mock_world(const json& doc) {
  if (!doc.is_object()) throw SchemaError("", "world must be a JSON object");
  MockWorld w;
  const auto& id = require(doc, "video_id", "");
  if (!id.is_string() || id.get<std::string>().empty()) throw SchemaError("/video_id", "must be a non-empty string");
  w.video_id = id.get<std::string>();
  const auto& fps = require(doc, "fps", "");
  try {
    w.fps = fps.is_string() ? Rational::parse(fps.get<std::string>()) : Rational::parse(fps.dump());
  } catch (const InvalidArgument& e) {
    throw SchemaError("/fps", e.what());
  }
  if (w.fps <= Rational(0)) throw SchemaError("/fps", "must be positive");
  const auto& fc = require(doc, "frame_count", "");
  if (!fc.is_number_integer() || fc.get<std::int64_t>() < 1) throw SchemaError("/frame_count", "must be an integer >= 1");
  w.frame_count = fc.get<std::int64_t>();
  if (doc.contains("transcript")) {
    if (!doc["transcript"].is_string()) throw SchemaError("/transcript", "must be a string");
    w.transcript = doc["transcript"].get<std::string>();
  }
  const auto& frames = require(doc, "frames", "");
  if (!frames.is_array()) throw SchemaError("/frames", "must be a list");
  for (std::size_t i = 0; i < frames.size() && static_cast<std::int64_t>(i) < w.frame_count; ++i) {
    w.frames.push_back(parse_frame(frames[i], i));
  }
  if (static_cast<std::int64_t>(frames.size()) < w.frame_count) {
    throw SchemaError(ptr("/frames", frames.size()), "frame " + std::to_string(frames.size()) + " is missing");
  }
  if (static_cast<std::int64_t>(frames.size()) > w.frame_count) {
    throw SchemaError(ptr("/frames", static_cast<std::size_t>(w.frame_count)),
                      "more frame entries than frame_count");
  }
  check_total(w.frames, &MockFrame::predicates, "predicates");
  check_total(w.frames, &MockFrame::qa, "qa");
  if (doc.contains("chunk_captions")) {
    const auto& cc = doc["chunk_captions"];
    if (!cc.is_array()) throw SchemaError("/chunk_captions", "must be a list");
    const auto expected = one_second_chunks(w).size();
    if (cc.size() != expected) {
      throw SchemaError(ptr("/chunk_captions", std::min<std::size_t>(cc.size(), expected)),
                        "expected " + std::to_string(expected) + " one-second chunk captions, got " +
                            std::to_string(cc.size()));
    }
    for (std::size_t i = 0; i < cc.size(); ++i) {
      if (!cc[i].is_string()) throw SchemaError(ptr("/chunk_captions", i), "must be a string");
      w.chunk_captions.push_back(cc[i].get<std::string>());
    }
  }
  if (doc.contains("llm")) {
    const auto& rules = doc["llm"];
    if (!rules.is_array()) throw SchemaError("/llm", "must be a list");
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const std::string where = ptr("/llm", i);
      const auto& r = rules[i];
      LlmRule rule;
      if (r.contains("exact")) {
        rule.kind = LlmRule::Kind::Exact;
        rule.pattern = r["exact"].get<std::string>();
      } else if (r.contains("contains")) {
        rule.kind = LlmRule::Kind::Contains;
        rule.pattern = r["contains"].get<std::string>();
      } else if (r.contains("prompt_sha256")) {
        rule.kind = LlmRule::Kind::PromptSha256;
        rule.pattern = r["prompt_sha256"].get<std::string>();
      } else {
        throw SchemaError(where, "rule needs one of exact / contains / prompt_sha256");
      }
      const auto& resp = require(r, "response", where);
      if (!resp.is_string()) throw SchemaError(ptr(where, "response"), "must be a string");
      rule.response = resp.get<std::string>();
      w.llm.push_back(std::move(rule));
    }
  }
  w.fingerprint = text::sha256_hex(doc.dump());
  return w;
}

MockWorld load_mock_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mock world: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw SchemaError("", path.string() + ": " + e.what());
  }
  try {
    return parse_mock_world(doc);
  } catch (const SchemaError& e) {
    throw SchemaError(e.pointer(), path.string() + ": " + e.what());
  }
}

Corruption parse_corruption(std::string_view name) {
  if (name == "wrong_answer") return Corruption::WrongAnswer;
  if (name == "drop_detection") return Corruption::DropDetection;
  if (name == "garble_caption" || name == "garble") return Corruption::GarbleCaption;
  throw InvalidArgument("unknown corruption: " + std::string(name));
}

const char* to_string(Corruption c) noexcept {
  switch (c) {
    case Corruption::WrongAnswer: return "wrong_answer";
    case Corruption::DropDetection: return "drop_detection";
    case Corruption::GarbleCaption: return "garble_caption";
  }
  return "?";
}

MockWorld inject_fault(const MockWorld& world, const FaultSpec& spec) {
  if (!(spec.rate >= 0.0 && spec.rate <= 1.0)) throw InvalidArgument("fault rate must be in [0, 1]");
  const bool ok = [&] {
    switch (spec.capability) {
      case Capability::ImageQA: return spec.corruption == Corruption::WrongAnswer;
      case Capability::Detect: return spec.corruption == Corruption::DropDetection;
      case Capability::CaptionImage:
      case Capability::CaptionVideoChunk:
      case Capability::Transcribe: return spec.corruption == Corruption::GarbleCaption;
      case Capability::LLMComplete: return spec.corruption != Corruption::DropDetection;
    }
    return false;
  }();
  if (!ok) {
    throw InvalidArgument(std::string("corruption ") + to_string(spec.corruption) +
                          " does not apply to " + to_string(spec.capability));
  }

  MockWorld out = world;
  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution coin(spec.rate);
  std::size_t altered = 0;
  // Explicit item sets win over the rate.
  auto pick = [&](std::int64_t item) {
    const bool hit = spec.frames.empty() ? coin(rng) : spec.frames.count(item) > 0;
    if (hit) ++altered;
    return hit;
  };

  switch (spec.capability) {
    case Capability::ImageQA: {
      // A wrong answer is the next distinct answer to the same question elsewhere in the world.
      std::map<std::string, std::set<std::string>> answers;
      for (const auto& f : world.frames) {
        for (const auto& [q, a] : f.qa) answers[q].insert(a);
        for (const auto& c : f.crop_qa) {
          for (const auto& [q, a] : c.qa) answers[q].insert(a);
        }
      }
      auto wrong = [&](const std::string& q, const std::string& a) {
        const auto& pool = answers[q];
        auto it = pool.upper_bound(a);
        if (it == pool.end()) it = pool.begin();
        return (it == pool.end() || *it == a) ? std::string("none") : *it;
      };
      for (std::size_t i = 0; i < out.frames.size(); ++i) {
        if (!pick(static_cast<std::int64_t>(i))) continue;
        auto& f = out.frames[i];
        for (auto& [q, v] : f.predicates) v = !v;
        for (auto& [q, a] : f.qa) a = wrong(q, a);
        for (auto& c : f.crop_qa) {
          for (auto& [q, a] : c.qa) a = wrong(q, a);
        }
      }
      break;
    }
    case Capability::Detect:
      for (std::size_t i = 0; i < out.frames.size(); ++i) {
        for (auto& [name, boxes] : out.frames[i].objects) {
          std::vector<ScoredBox> kept;
          for (const auto& b : boxes) {
            const bool drop = spec.frames.empty() ? coin(rng) : spec.frames.count(static_cast<std::int64_t>(i)) > 0;
            if (drop) {
              ++altered;
            } else {
              kept.push_back(b);
            }
          }
          boxes = std::move(kept);
        }
      }
      break;
    case Capability::CaptionImage:
      for (std::size_t i = 0; i < out.frames.size(); ++i) {
        if (pick(static_cast<std::int64_t>(i))) out.frames[i].caption = garble(out.frames[i].caption);
      }
      break;
    case Capability::CaptionVideoChunk:
      for (std::size_t i = 0; i < out.chunk_captions.size(); ++i) {
        if (pick(static_cast<std::int64_t>(i))) out.chunk_captions[i] = garble(out.chunk_captions[i]);
      }
      break;
    case Capability::Transcribe:
      if (out.transcript && pick(0)) out.transcript = garble(*out.transcript);
      break;
    case Capability::LLMComplete:
      for (std::size_t i = 0; i < out.llm.size(); ++i) {
        if (pick(static_cast<std::int64_t>(i))) out.llm[i].response = garble(out.llm[i].response);
      }
      break;
  }
  if (altered > 0) {
    std::string tag = world.fingerprint + "|" + to_string(spec.capability) + "|" +
                      to_string(spec.corruption) + "|" + std::to_string(spec.rate) + "|" +
                      std::to_string(spec.seed);
    for (auto f : spec.frames) tag += "," + std::to_string(f);
    out.fingerprint = text::sha256_hex(tag);
  }
  return out;
}

// ---------------------------------------------------------------------------

MockBackend::MockBackend(std::vector<std::shared_ptr<const MockWorld>> worlds) {
  for (auto& w : worlds) add_world(std::move(w));
}

void MockBackend::add_world(std::shared_ptr<const MockWorld> world) {
  const auto id = world->video_id;
  if (!worlds_.count(id)) order_.push_back(id);
  worlds_[id] = std::move(world);
}

bool MockBackend::supports(Capability) const { return true; }

std::string MockBackend::fingerprint() const {
  std::string fp = "mock";
  for (const auto& id : order_) fp += ";" + id + "=" + worlds_.at(id)->fingerprint;
  return text::sha256_hex(fp);
}

const MockWorld& MockBackend::world(const std::string& video_id) const {
  auto it = worlds_.find(video_id);
  if (it == worlds_.end()) throw MockMiss(video_id, -1, "unknown video");
  return *it->second;
}

namespace {

std::optional<std::string> match_llm(const MockWorld& w, const std::string& prompt) {
  std::optional<std::string> digest;
  for (const auto& rule : w.llm) {
    switch (rule.kind) {
      case LlmRule::Kind::Exact:
        if (prompt == rule.pattern) return rule.response;
        break;
      case LlmRule::Kind::Contains:
        if (prompt.find(rule.pattern) != std::string::npos) return rule.response;
        break;
      case LlmRule::Kind::PromptSha256:
        if (!digest) digest = text::sha256_hex(prompt);
        if (*digest == rule.pattern) return rule.response;
        break;
    }
  }
  return std::nullopt;
}

}  // namespace

CapabilityResponse MockBackend::call(const CapabilityRequest& req) {
  CapabilityResponse resp;
  resp.capability = req.capability;

  if (req.capability == Capability::LLMComplete) {
    if (auto it = worlds_.find(req.video_id); it != worlds_.end()) {
      if (auto r = match_llm(*it->second, req.text)) {
        resp.text = *r;
        return resp;
      }
    }
    for (const auto& id : order_) {
      if (auto r = match_llm(*worlds_.at(id), req.text)) {
        resp.text = *r;
        return resp;
      }
    }
    throw MockMiss(req.video_id, -1, "llm prompt " + text::sha256_hex(req.text).substr(0, 12));
  }

  const MockWorld& w = world(req.video_id);
  if (req.capability == Capability::Transcribe) {
    if (!w.transcript) throw MockMiss(w.video_id, -1, "transcript");
    resp.text = *w.transcript;
    return resp;
  }
  if (req.capability == Capability::CaptionVideoChunk) {
    const auto chunks = one_second_chunks(w);
    for (std::size_t i = 0; i < chunks.size() && i < w.chunk_captions.size(); ++i) {
      if (chunks[i].first == req.chunk_start && chunks[i].second == req.chunk_end) {
        resp.text = w.chunk_captions[i];
        return resp;
      }
    }
    throw MockMiss(w.video_id, req.chunk_start, "chunk caption [" + std::to_string(req.chunk_start) +
                                                    "," + std::to_string(req.chunk_end) + ")");
  }

  if (req.frame < 0 || req.frame >= w.frame_count) throw MockMiss(w.video_id, req.frame, "frame out of range");
  const MockFrame& f = w.frames[static_cast<std::size_t>(req.frame)];
  const std::string key = text::canonical_phrase(req.text);
  switch (req.capability) {
    case Capability::ImageQA: {
      if (req.region) {
        for (const auto& c : f.crop_qa) {
          if (!nearly_equal(c.box, *req.region)) continue;
          if (auto it = c.qa.find(key); it != c.qa.end()) {
            resp.text = it->second;
            return resp;
          }
        }
      }
      if (auto it = f.qa.find(key); it != f.qa.end()) {
        resp.text = it->second;
        return resp;
      }
      if (auto it = f.predicates.find(key); it != f.predicates.end()) {
        resp.text = it->second ? "yes" : "no";
        return resp;
      }
      throw MockMiss(w.video_id, req.frame, req.text);
    }
    case Capability::Detect: {
      auto it = f.objects.find(key);
      if (it == f.objects.end()) return resp;
      for (const auto& b : it->second) {
        // Inside a crop only detections centred in the region are visible.
        if (req.region && !(b.box.cx() >= req.region->x1 && b.box.cx() <= req.region->x2 &&
                            b.box.cy() >= req.region->y1 && b.box.cy() <= req.region->y2)) {
          continue;
        }
        resp.boxes.push_back(b);
      }
      return resp;
    }
    case Capability::CaptionImage:
      resp.text = f.caption;
      return resp;
    default:
      break;
  }
  throw MockMiss(w.video_id, req.frame, to_string(req.capability));
}

}  // namespace proviq
