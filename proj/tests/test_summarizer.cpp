#include <random>
#include <sstream>

#include "doctest.h"
#include "proviq/errors.hpp"
#include "proviq/summarizer.hpp"
#include "support.hpp"

using namespace proviq;
using namespace testsupport;

namespace {

SourceVideo video(Rational fps, std::int64_t frames, const std::string& id = "v") {
  SourceVideo v;
  v.video_id = id;
  v.fps = fps;
  v.frame_count = frames;
  return v;
}

// Integer reference for chunk boundaries at fps = p / q and chunk length a / b seconds.
std::vector<ChunkRange> oracle_chunks(std::int64_t p, std::int64_t q, std::int64_t n, std::int64_t a = 1,
                                      std::int64_t b = 1) {
  std::vector<ChunkRange> out;
  for (std::int64_t i = 0;; ++i) {
    const std::int64_t start = i * a * p / (b * q);
    if (start >= n) break;
    out.push_back({start, std::min(n, (i + 1) * a * p / (b * q))});
  }
  return out;
}

std::size_t count_caption_lines(const std::string& prompt) {
  std::istringstream in(prompt);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty() && line[0] == '[';
  return n;
}

}  // namespace

TEST_CASE("chunk tiling matches integer arithmetic") {
  const std::vector<std::pair<std::int64_t, std::int64_t>> rates = {{24, 1},    {25, 1},   {30, 1},     {30000, 1001},
                                                                    {24000, 1001}, {25, 2}, {2, 1},   {5994, 100}};
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    const auto [p, q] = rates[t % rates.size()];
    const std::int64_t n = std::uniform_int_distribution<std::int64_t>(1, 6000)(rng);
    const auto v = video(Rational(p, q), n);
    const auto got = chunk(v);
    CHECK(got == oracle_chunks(p, q, n));
    CHECK(static_cast<std::int64_t>(got.size()) == ceil(v.duration_s()));
    CHECK(got.front().start_frame == 0);
    CHECK(got.back().end_frame == n);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].end_frame > got[i].start_frame);
      if (i) CHECK(got[i].start_frame == got[i - 1].end_frame);
    }
  }
  CHECK(chunk(video(Rational(30), 90), Rational(2)) == oracle_chunks(30, 1, 90, 2, 1));
  CHECK(chunk(video(Rational(30), 95), Rational(1, 2)) == oracle_chunks(30, 1, 95, 1, 2));
  CHECK_THROWS_AS(chunk(video(Rational(2), 10), Rational(1, 4)), InvalidArgument);
  CHECK_THROWS_AS(chunk(video(Rational(2), 10), Rational(0)), InvalidArgument);
}

TEST_CASE("aggregation prompt has one line per chunk") {
  std::vector<ChunkCaption> caps;
  for (std::size_t i = 0; i < 180; ++i) {
    caps.push_back({i, Rational(static_cast<std::int64_t>(i)), Rational(static_cast<std::int64_t>(i + 1)),
                    "caption " + std::to_string(i), false, ""});
  }
  const auto prompt = build_aggregation_prompt(caps);
  CHECK(count_caption_lines(prompt) == 180);
  CHECK(prompt.find("[12.00s - 13.00s] caption 12\n") != std::string::npos);
  CHECK(prompt.size() > 180 * 20);
}

TEST_CASE("summary captions every chunk and fuses them") {
  auto doc = blank_world("walk", 9, "2");
  doc["chunk_captions"] = {"a", "b", "c", "d", "e"};
  doc["llm"] = {{{"contains", "Paragraph:"}, {"response", "  A calm walk.  "}}};
  MockRig rig(doc);
  CallLog log;
  const auto s = get_summary(*rig.sources[0], rig.gateway, {}, &log);
  CHECK(s.paragraph == "A calm walk.");
  CHECK(s.chunk_count() == 5);
  CHECK(s.chunks[4].caption == "e");
  CHECK(s.chunks[4].end_s == Rational(9, 2));
  CHECK(log.total() == 6);
  CHECK(s.prompt_fingerprint.size() == 64);
  const auto j = export_summary(s);
  CHECK(j["chunks"].size() == 5);
  CHECK(j["chunks"][4]["end_s"] == 4.5);
  CHECK(j["paragraph"] == "A calm walk.");
}

TEST_CASE("failed chunks are marked and all-failed summaries are errors") {
  auto doc = blank_world("walk", 4, "2");
  doc["llm"] = {{{"contains", "Paragraph:"}, {"response", "Something."}}};
  MockRig none(doc);
  try {
    get_summary(*none.sources[0], none.gateway);
    FAIL("expected failure");
  } catch (const ModuleError& e) {
    CHECK(e.kind() == ModuleErrorKind::SummaryFailed);
  }

  doc["chunk_captions"] = {"first", "second"};
  auto w = parse_mock_world(doc);
  FaultSpec spec;
  spec.capability = Capability::CaptionVideoChunk;
  spec.corruption = Corruption::GarbleCaption;
  spec.frames = {1};
  auto faulty = std::make_shared<MockBackend>();
  faulty->add_world(std::make_shared<const MockWorld>(inject_fault(w, spec)));
  Gateway gw;
  gw.add_backend(faulty);
  const auto s = get_summary(*w.source(), gw);
  CHECK(s.chunks[1].caption == "garbled: second");

  // A video longer than the tabulated captions: the extra chunks miss.
  const auto longer = video(Rational(2), 8, "walk");
  const auto caps = caption_chunks(longer, chunk(longer), Rational(1), gw);
  REQUIRE(caps.size() == 4);
  CHECK_FALSE(caps[0].failed);
  CHECK(caps[2].failed);
  CHECK(caps[3].caption == kCaptionUnavailable);
  CHECK(caps[3].error.find("mock miss") != std::string::npos);
  CHECK(get_summary(longer, gw).paragraph == "Something.");

  SummarizerConfig tiny;
  tiny.max_prompt_chars = 50;
  CHECK_THROWS_AS(get_summary(*w.source(), gw, tiny), ModuleError);
}
