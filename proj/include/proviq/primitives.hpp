#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "proviq/clip.hpp"
#include "proviq/gateway.hpp"
#include "proviq/geometry.hpp"

namespace proviq {

/// Answer -> count, in first-occurrence order.
class CounterMap {
 public:
  void add(const std::string& key, std::int64_t count = 1);
  const std::vector<std::pair<std::string, std::int64_t>>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::int64_t total() const noexcept;
  std::int64_t count(const std::string& key) const noexcept;

  friend bool operator==(const CounterMap&, const CounterMap&) = default;

 private:
  std::vector<std::pair<std::string, std::int64_t>> entries_;
};

/// A detected region of one frame.
struct Crop {
  FrameRef frame;
  Box box;
  double score = 0;
  friend bool operator==(const Crop&, const Crop&) = default;
};

/// Crops ordered by (frame index, descending score).
class CropClip {
 public:
  CropClip() = default;
  CropClip(std::shared_ptr<const SourceVideo> source, std::vector<Crop> crops)
      : source_(std::move(source)), crops_(std::move(crops)) {}

  const SourceVideo& source() const { return *source_; }
  const std::shared_ptr<const SourceVideo>& source_ptr() const noexcept { return source_; }
  const std::vector<Crop>& crops() const noexcept { return crops_; }
  std::int64_t num_frames() const noexcept { return static_cast<std::int64_t>(crops_.size()); }
  bool empty() const noexcept { return crops_.empty(); }

 private:
  std::shared_ptr<const SourceVideo> source_;
  std::vector<Crop> crops_;
};

struct OptionChoice {
  int index = 0;  // 1-based
  std::string rationale;
  friend bool operator==(const OptionChoice&, const OptionChoice&) = default;
};

struct PrimitiveConfig {
  double detect_threshold = 0.35;
  int llm_max_tokens = 256;
  double llm_temperature = 0.0;
};

/// Labeled context block for choose_option, in insertion order.
using ContextBlocks = std::vector<std::pair<std::string, std::string>>;

/// Lowercase, trim, strip terminal punctuation.
std::string normalize_vote(const std::string& answer);
/// True when the normalized answer starts with "yes".
bool is_affirmative(const std::string& answer);

/// Leading integer after an optional "option" word; nullopt otherwise.
std::optional<int> parse_option_index(const std::string& response);

std::string build_chooser_prompt(const std::string& question, const ContextBlocks& context,
                                 const std::vector<std::string>& options);
inline constexpr const char* kChooserReprompt = "Answer with the option number only.";

/// The visual API surface dispatched by the interpreter. Every call goes through the gateway.
class Primitives {
 public:
  Primitives(Gateway& gateway, PrimitiveConfig config = {});

  const PrimitiveConfig& config() const noexcept { return config_; }
  Gateway& gateway() const noexcept { return gateway_; }

  VideoClip filter_property(const VideoClip& clip, const std::string& property, CallLog* log = nullptr) const;
  CropClip filter_property(const CropClip& clip, const std::string& property, CallLog* log = nullptr) const;

  VideoClip filter_object(const VideoClip& clip, const std::string& object, CallLog* log = nullptr) const;
  CropClip filter_object(const CropClip& clip, const std::string& object, CallLog* log = nullptr) const;

  CropClip find(const VideoClip& clip, const std::string& object, CallLog* log = nullptr) const;
  CropClip find(const CropClip& clip, const std::string& object, CallLog* log = nullptr) const;

  CounterMap video_query(const VideoClip& clip, const std::string& query, CallLog* log = nullptr) const;
  CounterMap video_query(const CropClip& clip, const std::string& query, CallLog* log = nullptr) const;

  std::string get_caption(const VideoClip& clip, std::int64_t index, CallLog* log = nullptr) const;
  std::string get_caption(const CropClip& clip, std::int64_t index, CallLog* log = nullptr) const;

  /// Whole-video transcript: the source's own transcript, else TRANSCRIBE.
  std::string get_script(const SourceVideo& video, CallLog* log = nullptr) const;

  OptionChoice choose_option(const std::string& video_id, const std::string& question,
                             const ContextBlocks& context, const std::vector<std::string>& options,
                             CallLog* log = nullptr) const;

  /// Per-frame detections for `object` with score >= min_score, in frame order.
  std::vector<std::vector<ScoredBox>> detect(const VideoClip& clip, const std::string& object,
                                             double min_score, CallLog* log = nullptr) const;

 private:
  Gateway& gateway_;
  PrimitiveConfig config_;
};

}  // namespace proviq
