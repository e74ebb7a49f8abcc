#include "proviq/primitives.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "proviq/errors.hpp"
#include "proviq/text.hpp"

namespace proviq {

void CounterMap::add(const std::string& key, std::int64_t count) {
  for (auto& [k, c] : entries_) {
    if (k == key) {
      c += count;
      return;
    }
  }
  entries_.emplace_back(key, count);
}

std::int64_t CounterMap::total() const noexcept {
  std::int64_t sum = 0;
  for (const auto& [k, c] : entries_) sum += c;
  return sum;
}

std::int64_t CounterMap::count(const std::string& key) const noexcept {
  for (const auto& [k, c] : entries_) {
    if (k == key) return c;
  }
  return 0;
}

std::string normalize_vote(const std::string& answer) { return text::normalize_answer(answer); }

bool is_affirmative(const std::string& answer) {
  return text::starts_with(normalize_vote(answer), "yes");
}

std::optional<int> parse_option_index(const std::string& response) {
  static const std::regex kLeading(R"(^\s*(?:option\s*)?#?\s*(\d{1,6}))", std::regex::icase);
  std::smatch m;
  if (!std::regex_search(response, m, kLeading)) return std::nullopt;
  return std::stoi(m[1].str());
}

std::string build_chooser_prompt(const std::string& question, const ContextBlocks& context,
                                 const std::vector<std::string>& options) {
  std::ostringstream os;
  os << "You are answering a multiple-choice question about a video.\n";
  os << "Question: " << question << "\n";
  os << "Options:\n";
  for (std::size_t i = 0; i < options.size(); ++i) os << (i + 1) << ". " << options[i] << "\n";
  os << "Context:\n";
  for (const auto& [label, body] : context) os << "[" << label << "]\n" << body << "\n";
  os << "Reply with the number of the best option, then a short justification.\n";
  return os.str();
}

namespace {

struct Item {
  const FrameRef* frame;
  std::optional<Box> region;
};

std::vector<Item> items_of(const VideoClip& clip) {
  std::vector<Item> out;
  for (const auto& f : clip.frames()) out.push_back({&f, std::nullopt});
  return out;
}

std::vector<Item> items_of(const CropClip& clip) {
  std::vector<Item> out;
  for (const auto& c : clip.crops()) out.push_back({&c.frame, c.box});
  return out;
}

CapabilityRequest frame_request(Capability cap, const Item& item, const std::string& text) {
  CapabilityRequest r;
  r.capability = cap;
  r.video_id = item.frame->video_id;
  r.frame = item.frame->index;
  r.text = text;
  r.region = item.region;
  return r;
}

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

// One request per item; backend failures become ModuleErrors naming the frame.
std::vector<CapabilityResponse> per_item(Gateway& gw, const char* primitive, Capability cap,
                                         const std::vector<Item>& items, const std::string& text,
                                         CallLog* log) {
  std::vector<CapabilityRequest> reqs;
  reqs.reserve(items.size());
  for (const auto& it : items) reqs.push_back(frame_request(cap, it, text));
  auto outcomes = gw.call_settled(reqs, log);
  std::vector<CapabilityResponse> out;
  out.reserve(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].error) {
      throw ModuleError(ModuleErrorKind::Backend, primitive,
                        "frame " + std::to_string(items[i].frame->index) + ": " +
                            describe(outcomes[i].error));
    }
    out.push_back(std::move(*outcomes[i].response));
  }
  return out;
}

void require_text(const char* primitive, const std::string& value, const char* what) {
  if (text::trim(value).empty()) {
    throw ModuleError(ModuleErrorKind::InvalidArgument, primitive, std::string(what) + " must be non-empty");
  }
}

bool has_detection(const CapabilityResponse& r, double threshold) {
  return std::any_of(r.boxes.begin(), r.boxes.end(),
                     [&](const ScoredBox& b) { return b.score >= threshold; });
}

CounterMap tally(const std::vector<CapabilityResponse>& responses) {
  CounterMap counts;
  for (const auto& r : responses) counts.add(normalize_vote(r.text));
  return counts;
}

}  // namespace

Primitives::Primitives(Gateway& gateway, PrimitiveConfig config) : gateway_(gateway), config_(config) {}

VideoClip Primitives::filter_property(const VideoClip& clip, const std::string& property, CallLog* log) const {
  require_text("filter_property", property, "property");
  const auto responses = per_item(gateway_, "filter_property", Capability::ImageQA, items_of(clip), property, log);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (is_affirmative(responses[i].text)) keep.push_back(i);
  }
  return clip.subsequence(keep);
}

CropClip Primitives::filter_property(const CropClip& clip, const std::string& property, CallLog* log) const {
  require_text("filter_property", property, "property");
  const auto responses = per_item(gateway_, "filter_property", Capability::ImageQA, items_of(clip), property, log);
  std::vector<Crop> kept;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (is_affirmative(responses[i].text)) kept.push_back(clip.crops()[i]);
  }
  return CropClip(clip.source_ptr(), std::move(kept));
}

VideoClip Primitives::filter_object(const VideoClip& clip, const std::string& object, CallLog* log) const {
  require_text("filter_object", object, "object");
  const auto responses = per_item(gateway_, "filter_object", Capability::Detect, items_of(clip), object, log);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (has_detection(responses[i], config_.detect_threshold)) keep.push_back(i);
  }
  return clip.subsequence(keep);
}

CropClip Primitives::filter_object(const CropClip& clip, const std::string& object, CallLog* log) const {
  require_text("filter_object", object, "object");
  const auto responses = per_item(gateway_, "filter_object", Capability::Detect, items_of(clip), object, log);
  std::vector<Crop> kept;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (has_detection(responses[i], config_.detect_threshold)) kept.push_back(clip.crops()[i]);
  }
  return CropClip(clip.source_ptr(), std::move(kept));
}

namespace {

CropClip collect_crops(const std::shared_ptr<const SourceVideo>& source, const std::vector<Item>& items,
                       const std::vector<CapabilityResponse>& responses, double threshold) {
  std::vector<Crop> crops;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    for (const auto& b : responses[i].boxes) {
      if (b.score < threshold) continue;
      const bool dup = std::any_of(crops.begin(), crops.end(), [&](const Crop& c) {
        return c.frame.index == items[i].frame->index && c.box == b.box;
      });
      if (!dup) crops.push_back(Crop{*items[i].frame, b.box, b.score});
    }
  }
  std::stable_sort(crops.begin(), crops.end(), [](const Crop& a, const Crop& b) {
    if (a.frame.index != b.frame.index) return a.frame.index < b.frame.index;
    return a.score > b.score;
  });
  return CropClip(source, std::move(crops));
}

}  // namespace

CropClip Primitives::find(const VideoClip& clip, const std::string& object, CallLog* log) const {
  require_text("find", object, "object");
  const auto items = items_of(clip);
  const auto responses = per_item(gateway_, "find", Capability::Detect, items, object, log);
  return collect_crops(clip.source_ptr(), items, responses, config_.detect_threshold);
}

CropClip Primitives::find(const CropClip& clip, const std::string& object, CallLog* log) const {
  require_text("find", object, "object");
  const auto items = items_of(clip);
  const auto responses = per_item(gateway_, "find", Capability::Detect, items, object, log);
  return collect_crops(clip.source_ptr(), items, responses, config_.detect_threshold);
}

CounterMap Primitives::video_query(const VideoClip& clip, const std::string& query, CallLog* log) const {
  if (clip.empty()) throw ModuleError(ModuleErrorKind::EmptyClip, "video_query", "clip has no frames");
  return tally(per_item(gateway_, "video_query", Capability::ImageQA, items_of(clip), query, log));
}

CounterMap Primitives::video_query(const CropClip& clip, const std::string& query, CallLog* log) const {
  if (clip.empty()) throw ModuleError(ModuleErrorKind::EmptyClip, "video_query", "clip has no crops");
  return tally(per_item(gateway_, "video_query", Capability::ImageQA, items_of(clip), query, log));
}

namespace {

std::string caption_at(Gateway& gw, const std::vector<Item>& items, std::int64_t index, CallLog* log) {
  if (index < 0 || index >= static_cast<std::int64_t>(items.size())) {
    throw ModuleError(ModuleErrorKind::IndexOutOfRange, "get_caption",
                      "index " + std::to_string(index) + " outside [0, " + std::to_string(items.size()) + ")");
  }
  const std::vector<Item> one{items[static_cast<std::size_t>(index)]};
  return per_item(gw, "get_caption", Capability::CaptionImage, one, "", log).front().text;
}

}  // namespace

std::string Primitives::get_caption(const VideoClip& clip, std::int64_t index, CallLog* log) const {
  return caption_at(gateway_, items_of(clip), index, log);
}

std::string Primitives::get_caption(const CropClip& clip, std::int64_t index, CallLog* log) const {
  return caption_at(gateway_, items_of(clip), index, log);
}

std::string Primitives::get_script(const SourceVideo& video, CallLog* log) const {
  if (video.transcript) return *video.transcript;
  if (!gateway_.supports(Capability::Transcribe)) {
    throw ModuleError(ModuleErrorKind::NoTranscript, "get_script",
                      "no transcript for '" + video.video_id + "' and no TRANSCRIBE backend");
  }
  CapabilityRequest r;
  r.capability = Capability::Transcribe;
  r.video_id = video.video_id;
  try {
    return gateway_.call(r, log).text;
  } catch (const BudgetExceeded&) {
    throw;
  } catch (const MockMiss& e) {
    throw ModuleError(ModuleErrorKind::NoTranscript, "get_script", e.what());
  } catch (const Error& e) {
    throw ModuleError(ModuleErrorKind::Backend, "get_script", e.what());
  }
}

OptionChoice Primitives::choose_option(const std::string& video_id, const std::string& question,
                                       const ContextBlocks& context, const std::vector<std::string>& options,
                                       CallLog* log) const {
  if (options.empty()) {
    throw ModuleError(ModuleErrorKind::InvalidArgument, "choose_option", "no options to choose from");
  }
  const std::string prompt = build_chooser_prompt(question, context, options);
  auto ask = [&](const std::string& text) {
    CapabilityRequest r;
    r.capability = Capability::LLMComplete;
    r.video_id = video_id;
    r.text = text;
    r.max_tokens = config_.llm_max_tokens;
    r.temperature = config_.llm_temperature;
    try {
      return gateway_.call(r, log).text;
    } catch (const BudgetExceeded&) {
      throw;
    } catch (const Error& e) {
      throw ModuleError(ModuleErrorKind::Backend, "choose_option", e.what());
    }
  };
  auto in_range = [&](std::optional<int> idx) {
    return idx && *idx >= 1 && *idx <= static_cast<int>(options.size());
  };
  std::string response = ask(prompt);
  auto idx = parse_option_index(response);
  if (!in_range(idx)) {
    response = ask(prompt + "\n" + response + "\n" + kChooserReprompt + "\n");
    idx = parse_option_index(response);
    if (!in_range(idx)) {
      throw ModuleError(ModuleErrorKind::UnparseableChoice, "choose_option",
                        "no option number in response: '" + response.substr(0, 80) + "'");
    }
  }
  return OptionChoice{*idx, response};
}

std::vector<std::vector<ScoredBox>> Primitives::detect(const VideoClip& clip, const std::string& object,
                                                       double min_score, CallLog* log) const {
  require_text("track_objects", object, "object");
  const auto responses = per_item(gateway_, "track_objects", Capability::Detect, items_of(clip), object, log);
  std::vector<std::vector<ScoredBox>> out;
  out.reserve(responses.size());
  for (const auto& r : responses) {
    std::vector<ScoredBox> kept;
    for (const auto& b : r.boxes) {
      if (b.score >= min_score) kept.push_back(b);
    }
    out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace proviq
