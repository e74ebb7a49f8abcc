#include "proviq/clip.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "proviq/errors.hpp"

namespace proviq {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidArgument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g ? num / g : num;
  den_ = g ? den / g : den;
}

Rational Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(std::stoll(text));
    const std::string frac = text.substr(dot + 1);
    if (frac.size() > 12) throw InvalidArgument("too many decimals: " + text);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::string digits = text.substr(0, dot) + frac;
    return Rational(std::stoll(digits), den);
  } catch (const std::logic_error&) {
    throw InvalidArgument("not a rational number: '" + text + "'");
  }
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  // Cross-reduce first to keep intermediates small.
  const std::int64_t g1 = std::gcd(a.num_, b.den_);
  const std::int64_t g2 = std::gcd(b.num_, a.den_);
  const std::int64_t n1 = g1 ? a.num_ / g1 : a.num_;
  const std::int64_t d2 = g1 ? b.den_ / g1 : b.den_;
  const std::int64_t n2 = g2 ? b.num_ / g2 : b.num_;
  const std::int64_t d1 = g2 ? a.den_ / g2 : a.den_;
  return Rational(n1 * n2, d1 * d2);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw InvalidArgument("division by zero rational");
  return a * Rational(b.den_, b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::int64_t floor(const Rational& r) {
  if (r.num() >= 0) return r.num() / r.den();
  return -((-r.num() + r.den() - 1) / r.den());
}

std::int64_t ceil(const Rational& r) { return -floor(Rational(-r.num(), r.den())); }

FrameRef SourceVideo::frame(std::int64_t index) const {
  FrameRef f;
  f.video_id = video_id;
  f.index = index;
  f.timestamp_s = Rational(index) / fps;
  f.payload = frame_source.kind;
  if (f.payload == PayloadKind::ImageFile) {
    char name[32];
    std::snprintf(name, sizeof name, "%06lld.", static_cast<long long>(index));
    f.path = (frame_source.directory / (name + frame_source.extension)).string();
  }
  return f;
}

std::shared_ptr<const SourceVideo> make_source(SourceVideo video) {
  if (video.fps <= Rational(0)) throw InvalidArgument("fps must be positive");
  if (video.frame_count < 1) throw InvalidArgument("frame_count must be >= 1");
  return std::make_shared<const SourceVideo>(std::move(video));
}

std::shared_ptr<const SourceVideo> load_frame_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("frame directory not found: " + dir.string());
  }
  const auto meta_path = dir / "metadata.json";
  std::ifstream in(meta_path);
  if (!in) throw ConfigError("missing frame metadata: " + meta_path.string());
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(meta_path.string(), e.what());
  }
  SourceVideo v;
  v.video_id = meta.value("video_id", dir.filename().string());
  if (!meta.contains("fps")) throw SchemaError("/fps", "required");
  if (!meta.contains("frame_count")) throw SchemaError("/frame_count", "required");
  const auto& fps = meta["fps"];
  v.fps = fps.is_string() ? Rational::parse(fps.get<std::string>())
                          : Rational::parse(fps.dump());
  v.frame_count = meta["frame_count"].get<std::int64_t>();
  v.frame_source.kind = PayloadKind::ImageFile;
  v.frame_source.directory = dir;
  v.frame_source.extension = meta.value("ext", std::string("jpg"));
  if (meta.contains("transcript") && meta["transcript"].is_string()) {
    v.transcript = meta["transcript"].get<std::string>();
  }
  auto source = make_source(std::move(v));
  const auto first = source->frame(0).path;
  if (!std::filesystem::exists(first)) throw ConfigError("missing frame file: " + first);
  return source;
}

VideoClip::VideoClip(std::shared_ptr<const SourceVideo> source)
    : source_(std::move(source)), start_(0), end_(source_->frame_count) {
  frames_.reserve(static_cast<std::size_t>(end_));
  for (std::int64_t i = 0; i < end_; ++i) frames_.push_back(source_->frame(i));
}

VideoClip::VideoClip(std::shared_ptr<const SourceVideo> source, std::int64_t start,
                     std::int64_t end, std::vector<FrameRef> frames)
    : source_(std::move(source)), start_(start), end_(end), frames_(std::move(frames)) {
  if (!source_) throw InvalidArgument("clip without source");
  if (start_ < 0 || start_ > end_ || end_ > source_->frame_count) {
    throw InvalidArgument("clip bounds out of range");
  }
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (i > 0 && frames_[i].index <= frames_[i - 1].index) {
      throw InvalidArgument("clip frames must be strictly increasing");
    }
    if (frames_[i].index < start_ || frames_[i].index >= end_) {
      throw InvalidArgument("clip frame outside [start, end)");
    }
  }
}

std::vector<std::int64_t> VideoClip::indices() const {
  std::vector<std::int64_t> out;
  out.reserve(frames_.size());
  for (const auto& f : frames_) out.push_back(f.index);
  return out;
}

VideoClip VideoClip::subsequence(const std::vector<std::size_t>& positions) const {
  std::vector<FrameRef> kept;
  kept.reserve(positions.size());
  for (auto p : positions) kept.push_back(frames_.at(p));
  if (kept.empty()) return VideoClip(source_, start_, start_, {});
  const auto s = kept.front().index;
  const auto e = kept.back().index + 1;
  return VideoClip(source_, s, e, std::move(kept));
}

VideoClip sample_uniform(std::shared_ptr<const SourceVideo> source, std::int64_t n) {
  if (n < 1) throw InvalidArgument("sample_uniform: n must be >= 1");
  const std::int64_t count = source->frame_count;
  std::vector<FrameRef> frames;
  std::int64_t last = -1;
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::int64_t>((static_cast<__int128>(i) * count) / n);
    if (idx != last) {
      frames.push_back(source->frame(idx));
      last = idx;
    }
  }
  return VideoClip(source, 0, count, std::move(frames));
}

VideoClip trim(const VideoClip& clip, std::int64_t a, std::int64_t b) {
  if (a < 0 || a > b || b > clip.num_frames()) {
    throw InvalidArgument("trim(" + std::to_string(a) + ", " + std::to_string(b) +
                          ") out of range for clip of " + std::to_string(clip.num_frames()) +
                          " frames");
  }
  if (a == 0 && b == clip.num_frames()) return clip;
  const auto& all = clip.frames();
  std::vector<FrameRef> kept(all.begin() + a, all.begin() + b);
  if (kept.empty()) {
    const auto anchor = a < clip.num_frames() ? all[static_cast<std::size_t>(a)].index : clip.end();
    return VideoClip(clip.source_ptr(), anchor, anchor, {});
  }
  const auto s = kept.front().index;
  const auto e = kept.back().index + 1;
  return VideoClip(clip.source_ptr(), s, e, std::move(kept));
}

}  // namespace proviq
