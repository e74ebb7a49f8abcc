#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace proviq {

/// Exact non-negative rational, always stored reduced with a positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Parses "30", "29.97" or "30000/1001".
  static Rational parse(const std::string& text);
  std::string str() const;

  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// floor(r) for r >= 0.
std::int64_t floor(const Rational& r);
/// ceil(r) for r >= 0.
std::int64_t ceil(const Rational& r);

enum class PayloadKind { Symbolic, ImageFile };

struct FrameRef {
  std::string video_id;
  std::int64_t index = 0;
  Rational timestamp_s;
  PayloadKind payload = PayloadKind::Symbolic;
  std::string path;  // set for ImageFile payloads

  friend bool operator==(const FrameRef&, const FrameRef&) = default;
};

struct FrameSource {
  PayloadKind kind = PayloadKind::Symbolic;
  std::filesystem::path directory;  // ImageFile only
  std::string extension = "jpg";
};

struct SourceVideo {
  std::string video_id;
  Rational fps{30};
  std::int64_t frame_count = 1;
  FrameSource frame_source;
  std::optional<std::string> transcript;

  Rational duration_s() const { return Rational(frame_count) / fps; }
  FrameRef frame(std::int64_t index) const;
};

/// Throws InvalidArgument when fps <= 0 or frame_count < 1.
std::shared_ptr<const SourceVideo> make_source(SourceVideo video);

/// Loads `<dir>/metadata.json` ({fps, frame_count, ext?, video_id?, transcript?})
/// for a directory of `%06d.<ext>` frames.
std::shared_ptr<const SourceVideo> load_frame_directory(const std::filesystem::path& dir);

/// An ordered window over a source video. Immutable once built.
class VideoClip {
 public:
  VideoClip() = default;
  /// Full clip over every frame of the source.
  explicit VideoClip(std::shared_ptr<const SourceVideo> source);
  /// Throws InvalidArgument if the invariants (bounds, strictly increasing frames) fail.
  VideoClip(std::shared_ptr<const SourceVideo> source, std::int64_t start, std::int64_t end,
            std::vector<FrameRef> frames);

  const SourceVideo& source() const { return *source_; }
  const std::shared_ptr<const SourceVideo>& source_ptr() const noexcept { return source_; }
  std::int64_t start() const noexcept { return start_; }
  std::int64_t end() const noexcept { return end_; }
  const std::vector<FrameRef>& frames() const noexcept { return frames_; }
  std::int64_t num_frames() const noexcept { return static_cast<std::int64_t>(frames_.size()); }
  bool empty() const noexcept { return frames_.empty(); }

  std::vector<std::int64_t> indices() const;

  /// Keeps frames whose positions are listed (ascending) and recomputes bounds.
  VideoClip subsequence(const std::vector<std::size_t>& positions) const;

 private:
  std::shared_ptr<const SourceVideo> source_;
  std::int64_t start_ = 0;
  std::int64_t end_ = 0;
  std::vector<FrameRef> frames_;
};

/// Frame i is floor(i * frame_count / n), deduplicated. Throws InvalidArgument for n == 0.
VideoClip sample_uniform(std::shared_ptr<const SourceVideo> source, std::int64_t n);

/// Positional half-open slice [a, b) of the clip's frame list.
VideoClip trim(const VideoClip& clip, std::int64_t a, std::int64_t b);

inline std::int64_t clip_len(const VideoClip& clip) noexcept { return clip.num_frames(); }

}  // namespace proviq
