#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "proviq/clip.hpp"
#include "proviq/gateway.hpp"

namespace proviq {

struct ChunkRange {
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;  // exclusive
  friend bool operator==(const ChunkRange&, const ChunkRange&) = default;
};

struct ChunkCaption {
  std::size_t index = 0;
  Rational start_s;
  Rational end_s;
  std::string caption;
  bool failed = false;
  std::string error;
};

struct NarrativeSummary {
  std::string video_id;
  std::string paragraph;
  std::vector<ChunkCaption> chunks;
  std::string prompt_fingerprint;
  std::size_t chunk_count() const noexcept { return chunks.size(); }
};

struct SummarizerConfig {
  Rational chunk_s{1};
  std::size_t max_prompt_chars = 400000;
  int max_tokens = 1024;
  double temperature = 0.0;
};

inline constexpr const char* kCaptionUnavailable = "[caption unavailable]";
inline constexpr const char* kAggregationPromptVersion = "narrative-v1";

/// ceil(duration / chunk_s) half-open ranges; boundary i is floor(i * chunk_s * fps).
/// Throws InvalidArgument when a chunk would span less than one frame.
std::vector<ChunkRange> chunk(const SourceVideo& video, Rational chunk_s = Rational(1));

/// One CAPTION_VIDEO_CHUNK call per range, issued concurrently. Failed chunks carry
/// kCaptionUnavailable and the error text.
std::vector<ChunkCaption> caption_chunks(const SourceVideo& video, const std::vector<ChunkRange>& ranges,
                                         Rational chunk_s, Gateway& gateway, CallLog* log = nullptr);

/// "[12.00s - 13.00s] caption" per chunk, framed by the fixed instructions.
std::string build_aggregation_prompt(const std::vector<ChunkCaption>& captions);

/// Chunks, captions and fuses. Throws ModuleError(SummaryFailed) on an empty stream, an
/// oversized prompt or an LLM failure.
NarrativeSummary get_summary(const SourceVideo& video, Gateway& gateway, const SummarizerConfig& config = {},
                             CallLog* log = nullptr);

/// {video_id, chunks:[{start_s, end_s, caption}], paragraph}
nlohmann::json export_summary(const NarrativeSummary& summary);

}  // namespace proviq
