#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "proviq/errors.hpp"
#include "proviq/interpreter.hpp"
#include "proviq/primitives.hpp"
#include "proviq/text.hpp"
#include "support.hpp"

using namespace proviq;
using namespace testsupport;
using nlohmann::json;

namespace {

VideoClip random_clip(std::mt19937_64& rng, const std::shared_ptr<const SourceVideo>& src) {
  const auto n = src->frame_count;
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: return VideoClip(src);
    case 1: return sample_uniform(src, std::uniform_int_distribution<std::int64_t>(1, n)(rng));
    default: {
      const auto a = std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
      const auto b = std::uniform_int_distribution<std::int64_t>(a + 1, n)(rng);
      return trim(VideoClip(src), a, b);
    }
  }
}

ModuleErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ModuleError& e) {
    return e.kind();
  }
  FAIL("expected a ModuleError");
  return ModuleErrorKind::Backend;
}

}  // namespace

TEST_CASE("vote helpers") {
  CHECK(normalize_vote("  Red. ") == "red");
  CHECK(is_affirmative("Yes, clearly"));
  CHECK(is_affirmative("YES!"));
  CHECK_FALSE(is_affirmative("nope"));
  CHECK_FALSE(is_affirmative("no, yes"));
  CHECK(parse_option_index("2") == 2);
  CHECK(parse_option_index("Option 3: because") == 3);
  CHECK(parse_option_index("  #4 it is") == 4);
  CHECK(parse_option_index("OPTION#5") == 5);
  CHECK(parse_option_index("7.") == 7);
  CHECK_FALSE(parse_option_index("The answer is 2").has_value());
  CHECK_FALSE(parse_option_index("").has_value());
  for (const auto& f : yes_no_forms()) CHECK(is_affirmative(f) == oracle_yes(f));
}

TEST_CASE("filters agree with the brute-force oracle on random worlds") {
  std::mt19937_64 rng(42);
  for (int w = 0; w < 40; ++w) {
    const int n = std::uniform_int_distribution<int>(5, 60)(rng);
    const auto doc = random_world(rng, "w" + std::to_string(w), n);
    MockRig rig(doc);
    const auto clip = random_clip(rng, rig.sources[0]);
    for (const auto& q : property_questions()) {
      CallLog log;
      const auto got = rig.prims->filter_property(clip, q, &log);
      CHECK(got.indices() == oracle_filter_property(doc, q, clip.indices()));
      CHECK(log.total() == static_cast<std::size_t>(clip.num_frames()));
    }
    for (const auto& o : object_names()) {
      CHECK(rig.prims->filter_object(clip, o).indices() == oracle_filter_object(doc, o, clip.indices()));
    }
  }
}

TEST_CASE("detection threshold is inclusive") {
  auto doc = blank_world("t", 3);
  doc["frames"][0]["objects"] = {{"cat", {{{"box", jbox(0.1, 0.1, 0.2, 0.2)}, {"score", 0.35}}}}};
  doc["frames"][1]["objects"] = {{"cat", {{{"box", jbox(0.1, 0.1, 0.2, 0.2)}, {"score", 0.3499}}}}};
  MockRig rig(doc);
  CHECK(rig.prims->filter_object(VideoClip(rig.sources[0]), "cat").indices() == std::vector<std::int64_t>{0});
  PrimitiveConfig strict;
  strict.detect_threshold = 0.5;
  MockRig strict_rig(doc, strict);
  CHECK(strict_rig.prims->filter_object(VideoClip(strict_rig.sources[0]), "cat").empty());
}

TEST_CASE("video_query votes match the oracle over many answer streams") {
  const std::vector<std::string> forms = {"Red", "red.", " RED!", "blue", "Blue?", "green", "dark green", "Green ,"};
  std::mt19937_64 rng(8);
  constexpr int kStreams = 300;
  const int n = 24;
  auto doc = blank_world("votes", n);
  std::vector<std::vector<std::string>> answers(kStreams, std::vector<std::string>(n));
  for (int s = 0; s < kStreams; ++s) {
    for (int i = 0; i < n; ++i) {
      answers[s][i] = forms[rng() % forms.size()];
      doc["frames"][i]["qa"]["Q" + std::to_string(s) + "?"] = answers[s][i];
    }
  }
  MockRig rig(doc);
  for (int s = 0; s < kStreams; ++s) {
    const auto clip = random_clip(rng, rig.sources[0]);
    std::vector<std::string> stream;
    for (auto i : clip.indices()) stream.push_back(answers[s][static_cast<std::size_t>(i)]);
    const auto votes = rig.prims->video_query(clip, "Q" + std::to_string(s) + "?");
    const auto expect = oracle_votes(stream);
    CHECK(votes.entries() == expect);
    CHECK(votes.total() == clip.num_frames());
    CHECK(get_max_key(votes) == oracle_argmax(expect));
  }
}

TEST_CASE("find returns ordered, deduplicated crops above threshold") {
  std::mt19937_64 rng(5);
  for (int w = 0; w < 20; ++w) {
    auto doc = random_world(rng, "f", 20);
    // A duplicated detection in frame 0 must appear once.
    doc["frames"][0]["objects"]["dog"] = {{{"box", jbox(0.1, 0.1, 0.2, 0.2)}, {"score", 0.6}},
                                          {{"box", jbox(0.1, 0.1, 0.2, 0.2)}, {"score", 0.6}},
                                          {{"box", jbox(0.5, 0.5, 0.7, 0.7)}, {"score", 0.9}}};
    MockRig rig(doc);
    const auto clip = VideoClip(rig.sources[0]);
    const auto crops = rig.prims->find(clip, "dog");
    std::vector<std::tuple<std::int64_t, double, Box>> expect;
    for (auto i : clip.indices()) {
      std::vector<std::pair<double, Box>> frame;
      const auto& f = doc["frames"][static_cast<std::size_t>(i)];
      if (f.contains("objects") && f["objects"].contains("dog")) {
        for (const auto& d : f["objects"]["dog"]) {
          const auto& b = d["box"];
          const Box box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
          const double s = d["score"].get<double>();
          const bool seen = std::any_of(frame.begin(), frame.end(), [&](const auto& p) { return p.second == box; });
          if (s >= 0.35 && !seen) frame.emplace_back(s, box);
        }
      }
      std::stable_sort(frame.begin(), frame.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      for (const auto& [s, b] : frame) expect.emplace_back(i, s, b);
    }
    REQUIRE(crops.crops().size() == expect.size());
    for (std::size_t k = 0; k < expect.size(); ++k) {
      CHECK(crops.crops()[k].frame.index == std::get<0>(expect[k]));
      CHECK(crops.crops()[k].score == std::get<1>(expect[k]));
      CHECK(crops.crops()[k].box == std::get<2>(expect[k]));
    }
    CHECK(crops.crops()[0].score == doctest::Approx(0.9));
  }
}

TEST_CASE("crop clips query inside their regions") {
  auto doc = blank_world("c", 2);
  doc["frames"][0]["objects"] = {
      {"skier", {{{"box", jbox(0.0, 0.0, 0.5, 0.5)}, {"score", 0.9}}, {{"box", jbox(0.5, 0.5, 1.0, 1.0)}, {"score", 0.8}}}},
      {"jacket", {{{"box", jbox(0.1, 0.1, 0.2, 0.2)}, {"score", 0.7}}}}};
  doc["frames"][0]["crop_qa"] = {{{"box", jbox(0.1, 0.1, 0.2, 0.2)}, {"qa", {{"What color is this jacket?", "Red"}}}}};
  for (int i = 0; i < 2; ++i) doc["frames"][i]["qa"] = {{"What color is this jacket?", "unknown"}};
  MockRig rig(doc);
  const auto skiers = rig.prims->find(VideoClip(rig.sources[0]), "skier");
  REQUIRE(skiers.num_frames() == 2);
  const auto jackets = rig.prims->find(skiers, "jacket");
  REQUIRE(jackets.num_frames() == 1);  // only the first skier crop contains the jacket centre
  const auto votes = rig.prims->video_query(jackets, "What color is this jacket?");
  CHECK(votes.entries() == std::vector<std::pair<std::string, std::int64_t>>{{"red", 1}});
  CHECK(rig.prims->filter_object(skiers, "jacket").num_frames() == 1);
  CHECK(rig.prims->get_caption(skiers, 1) == "frame 0");
}

TEST_CASE("primitive failures are typed") {
  auto doc = blank_world("e", 4);
  MockRig rig(doc);
  const VideoClip clip(rig.sources[0]);
  CHECK(kind_of([&] { rig.prims->video_query(clip.subsequence({}), "Q?"); }) == ModuleErrorKind::EmptyClip);
  CHECK(kind_of([&] { rig.prims->video_query(CropClip{}, "Q?"); }) == ModuleErrorKind::EmptyClip);
  CHECK(kind_of([&] { rig.prims->get_caption(clip, 4); }) == ModuleErrorKind::IndexOutOfRange);
  CHECK(kind_of([&] { rig.prims->get_caption(clip, -1); }) == ModuleErrorKind::IndexOutOfRange);
  CHECK(kind_of([&] { rig.prims->filter_property(clip, "  "); }) == ModuleErrorKind::InvalidArgument);
  CHECK(kind_of([&] { rig.prims->get_script(*rig.sources[0]); }) == ModuleErrorKind::NoTranscript);
  try {
    rig.prims->filter_property(clip, "Is it raining?");
    FAIL("expected a backend failure");
  } catch (const ModuleError& e) {
    CHECK(e.kind() == ModuleErrorKind::Backend);
    CHECK(e.primitive() == "filter_property");
    CHECK(std::string(e.what()).find("frame 0") != std::string::npos);
  }
  CHECK(rig.prims->get_caption(clip, 3) == "frame 3");
}

TEST_CASE("get_script prefers the source transcript") {
  auto doc = blank_world("s", 2);
  doc["transcript"] = "spoken words";
  MockRig rig(doc);
  CHECK(rig.prims->get_script(*rig.sources[0]) == "spoken words");
  SourceVideo own = *rig.sources[0];
  own.transcript = "local";
  CallLog log;
  CHECK(rig.prims->get_script(own, &log) == "local");
  CHECK(log.total() == 0);
  Gateway empty;
  Primitives none(empty);
  CHECK(kind_of([&] { none.get_script(*rig.sources[0]); }) == ModuleErrorKind::NoTranscript);
}

TEST_CASE("choose_option parses, reprompts once, then fails") {
  const std::vector<std::string> options = {"pushed", "carried", "thrown"};
  const ContextBlocks ctx = {{"caption", "a bear"}, {"activity", "moving"}};
  const auto prompt = build_chooser_prompt("How?", ctx, options);
  CHECK(prompt.find("1. pushed\n2. carried\n3. thrown\n") != std::string::npos);
  CHECK(prompt.find("[caption]\na bear\n[activity]\nmoving\n") != std::string::npos);

  auto doc = blank_world("llm", 1);
  doc["llm"] = {{{"contains", kChooserReprompt}, {"response", "Option 3"}},
                {{"contains", "Question: direct"}, {"response", "2. because it was lifted"}},
                {{"contains", "Question: vague"}, {"response", "probably the second one"}},
                {{"contains", "Question: range"}, {"response", "9"}}};
  MockRig rig(doc);
  CallLog log;
  const auto direct = rig.prims->choose_option("llm", "direct", ctx, options, &log);
  CHECK(direct.index == 2);
  CHECK(direct.rationale == "2. because it was lifted");
  CHECK(log.total() == 1);
  CHECK(rig.prims->choose_option("llm", "vague", ctx, options, &log).index == 3);
  CHECK(rig.prims->choose_option("llm", "range", ctx, options).index == 3);
  CHECK(log.total() == 3);

  auto stubborn = blank_world("llm2", 1);
  stubborn["llm"] = {{{"contains", "Question"}, {"response", "I cannot say"}}};
  MockRig rig2(stubborn);
  CHECK(kind_of([&] { rig2.prims->choose_option("llm2", "q", ctx, options); }) == ModuleErrorKind::UnparseableChoice);
  CHECK(kind_of([&] { rig2.prims->choose_option("llm2", "q", ctx, {}); }) == ModuleErrorKind::InvalidArgument);
}

TEST_CASE("detect keeps per-frame boxes above the floor") {
  auto doc = blank_world("d", 3);
  doc["frames"][1]["objects"] = {{"dog", {{{"box", jbox(0.1, 0.1, 0.2, 0.2)}, {"score", 0.9}},
                                          {{"box", jbox(0.3, 0.3, 0.4, 0.4)}, {"score", 0.05}}}}};
  MockRig rig(doc);
  const auto dets = rig.prims->detect(VideoClip(rig.sources[0]), "dog", 0.1);
  REQUIRE(dets.size() == 3);
  CHECK(dets[0].empty());
  CHECK(dets[1].size() == 1);
  CHECK(rig.prims->detect(VideoClip(rig.sources[0]), "dog", 0.0)[1].size() == 2);
}
