#include "proviq/summarizer.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "proviq/errors.hpp"
#include "proviq/text.hpp"

namespace proviq {

namespace {

std::string seconds(const Rational& r) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2fs", r.to_double());
  return buf;
}

}  // namespace

std::vector<ChunkRange> chunk(const SourceVideo& video, Rational chunk_s) {
  if (chunk_s <= Rational(0)) throw InvalidArgument("chunk length must be positive");
  const Rational step = chunk_s * video.fps;
  if (step < Rational(1)) {
    throw InvalidArgument("chunk length " + chunk_s.str() + "s is shorter than one frame");
  }
  const std::int64_t k = ceil(Rational(video.frame_count) / step);
  std::vector<ChunkRange> out;
  out.reserve(static_cast<std::size_t>(k));
  for (std::int64_t i = 0; i < k; ++i) {
    out.push_back({floor(Rational(i) * step), std::min(video.frame_count, floor(Rational(i + 1) * step))});
  }
  return out;
}

std::vector<ChunkCaption> caption_chunks(const SourceVideo& video, const std::vector<ChunkRange>& ranges,
                                         Rational chunk_s, Gateway& gateway, CallLog* log) {
  std::vector<CapabilityRequest> reqs;
  reqs.reserve(ranges.size());
  for (const auto& r : ranges) {
    CapabilityRequest req;
    req.capability = Capability::CaptionVideoChunk;
    req.video_id = video.video_id;
    req.chunk_start = r.start_frame;
    req.chunk_end = r.end_frame;
    reqs.push_back(std::move(req));
  }
  const auto outcomes = gateway.call_settled(reqs, log);
  const Rational duration = video.duration_s();
  std::vector<ChunkCaption> out;
  out.reserve(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    ChunkCaption c;
    c.index = i;
    c.start_s = Rational(static_cast<std::int64_t>(i)) * chunk_s;
    c.end_s = std::min(Rational(static_cast<std::int64_t>(i + 1)) * chunk_s, duration);
    if (outcomes[i].error) {
      c.caption = kCaptionUnavailable;
      c.failed = true;
      try {
        std::rethrow_exception(outcomes[i].error);
      } catch (const BudgetExceeded&) {
        throw;
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    } else {
      c.caption = outcomes[i].response->text;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::string build_aggregation_prompt(const std::vector<ChunkCaption>& captions) {
  std::ostringstream os;
  os << "The lines below are captions of consecutive short segments of one video, each\n"
        "prefixed with its time span. Write a single paragraph narrating what happens in\n"
        "the video, in chronological order, using one sentence for every 5 seconds of\n"
        "footage. Do not mention the captions themselves.\n\n";
  for (const auto& c : captions) {
    os << "[" << seconds(c.start_s) << " - " << seconds(c.end_s) << "] " << c.caption << "\n";
  }
  os << "\nParagraph:";
  return os.str();
}

NarrativeSummary get_summary(const SourceVideo& video, Gateway& gateway, const SummarizerConfig& config,
                             CallLog* log) {
  NarrativeSummary out;
  out.video_id = video.video_id;
  const auto ranges = chunk(video, config.chunk_s);
  if (ranges.empty()) throw ModuleError(ModuleErrorKind::SummaryFailed, "get_summary", "video has no chunks");
  out.chunks = caption_chunks(video, ranges, config.chunk_s, gateway, log);
  if (std::all_of(out.chunks.begin(), out.chunks.end(), [](const ChunkCaption& c) { return c.failed; })) {
    throw ModuleError(ModuleErrorKind::SummaryFailed, "get_summary",
                      "no chunk could be captioned: " + out.chunks.front().error);
  }

  const std::string prompt = build_aggregation_prompt(out.chunks);
  if (prompt.size() > config.max_prompt_chars) {
    throw ModuleError(ModuleErrorKind::SummaryFailed, "get_summary",
                      "aggregation prompt is " + std::to_string(prompt.size()) + " characters, limit " +
                          std::to_string(config.max_prompt_chars));
  }
  out.prompt_fingerprint = text::sha256_hex(std::string(kAggregationPromptVersion) + "\n" + prompt);

  CapabilityRequest req;
  req.capability = Capability::LLMComplete;
  req.video_id = video.video_id;
  req.text = prompt;
  req.max_tokens = config.max_tokens;
  req.temperature = config.temperature;
  try {
    out.paragraph = text::trim(gateway.call(req, log).text);
  } catch (const BudgetExceeded&) {
    throw;
  } catch (const std::exception& e) {
    throw ModuleError(ModuleErrorKind::SummaryFailed, "get_summary", e.what());
  }
  if (out.paragraph.empty()) {
    throw ModuleError(ModuleErrorKind::SummaryFailed, "get_summary", "empty narrative");
  }
  return out;
}

nlohmann::json export_summary(const NarrativeSummary& summary) {
  nlohmann::json chunks = nlohmann::json::array();
  for (const auto& c : summary.chunks) {
    chunks.push_back({{"start_s", c.start_s.to_double()}, {"end_s", c.end_s.to_double()}, {"caption", c.caption}});
  }
  return {{"video_id", summary.video_id}, {"chunks", std::move(chunks)}, {"paragraph", summary.paragraph}};
}

}  // namespace proviq
