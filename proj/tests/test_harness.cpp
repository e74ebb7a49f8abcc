#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "proviq/errors.hpp"
#include "proviq/harness.hpp"
#include "support.hpp"

using namespace proviq;
using namespace testsupport;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

EngineConfig suite_config() { return load_engine_config(suite_dir() / "config.json"); }

std::vector<BenchmarkRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in);
}

}  // namespace

TEST_CASE("dataset parsing") {
  const auto rows = parse(
      "{\"question_id\": 7, \"video_id\": \"v\", \"question\": \"q?\", \"answers\": \"red\"}\n"
      "\n"
      "{\"question_id\": \"b\", \"video_id\": \"v\", \"question\": \"q?\", \"answers\": [\"x\", \"y\"],"
      " \"options\": [\"x\", \"z\"], \"type\": \"t\"}\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].question_id == "7");
  CHECK(rows[0].answers == std::vector<std::string>{"red"});
  CHECK_FALSE(rows[0].multiple_choice());
  CHECK(rows[1].multiple_choice());
  CHECK(rows[1].to_json()["type"] == "t");

  auto error_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string ok = "{\"question_id\": \"a\", \"video_id\": \"v\", \"question\": \"q\", \"answers\": [\"x\"]}\n";
  CHECK(error_of(ok + ok).find("line 2") != std::string::npos);
  CHECK(error_of(ok + "{oops\n").find("line 2") != std::string::npos);
  CHECK(error_of("{\"question_id\": \"a\", \"video_id\": \"v\", \"question\": \"q\", \"answers\": []}\n")
            .find("no ground-truth") != std::string::npos);
  CHECK_THROWS_AS(load_dataset(suite_dir() / "nope.jsonl"), ConfigError);
  CHECK(load_dataset(suite_dir() / "dataset.jsonl").size() >= 30);
}

TEST_CASE("classification separates post-processing misses from wrong answers") {
  CHECK(classify({"Red", "crimson"}, "crimson", "red") == Outcome::Correct);
  CHECK(classify({"red"}, "Red.", "blue") == Outcome::PostprocessMismatch);
  CHECK(classify({"red"}, "green", "blue") == Outcome::WrongAnswer);

  std::vector<EvalRecord> recs(4);
  recs[0].outcome = Outcome::Correct;
  recs[0].record.type = "color";
  recs[1].outcome = Outcome::WrongAnswer;
  recs[1].record.type = "color";
  recs[2].outcome = Outcome::GenerationFailure;
  recs[3].outcome = Outcome::Correct;
  const auto r = summarize_records(recs);
  CHECK(r.accuracy() == 0.5);
  CHECK(r.by_type.at("color").correct == 1);
  CHECK(r.by_type.at("color").total == 2);
  const auto j = r.to_json();
  CHECK(j["counts"]["module_failure"] == 0);
  CHECK(j["counts"]["generation_failure"] == 1);
  CHECK(EvalReport{}.accuracy() == 0.0);
}

TEST_CASE("engine config parsing") {
  const auto c = suite_config();
  CHECK(c.mock_worlds.size() == 6);
  CHECK(std::is_sorted(c.mock_worlds.begin(), c.mock_worlds.end()));
  CHECK(c.fixtures == suite_dir() / "fixtures");
  CHECK(c.vocab_mode == VocabMode::TypeBased);
  CHECK(c.api_include.count("get_summary") == 1);

  const auto base = std::filesystem::path("/tmp");
  CHECK_THROWS_AS(parse_engine_config({{"colour", 1}}, base), ConfigError);
  CHECK_THROWS_AS(parse_engine_config({{"budget", {{"max_statements", 0}}}}, base), ConfigError);
  CHECK_THROWS_AS(parse_engine_config({{"generation", {{"mode", "magic"}}}}, base), ConfigError);
  CHECK_THROWS_AS(parse_engine_config({{"workers", "four"}}, base), ConfigError);
  CHECK_THROWS_AS(parse_engine_config({{"faults", {{{"capability", "TELEPATHY"}}}}}, base), ConfigError);
  CHECK_THROWS_AS(parse_engine_config({{"mock_worlds", "no_such_dir"}}, base), ConfigError);

  const auto f = parse_engine_config(
      {{"seed", 9},
       {"faults", {{{"capability", "IMAGE_QA"}, {"corruption", "wrong_answer"}, {"rate", 0.5}}}},
       {"tracker", {{"second_stage", false}}},
       {"summarizer", {{"chunk_s", "1/2"}}},
       {"remote", {{"base_url", "http://x"}, {"overrides", {{"DETECT", "http://d"}}}}}},
      base);
  REQUIRE(f.faults.size() == 1);
  CHECK(f.faults[0].seed == 9);
  CHECK_FALSE(f.interpreter.tracker.second_stage);
  CHECK(f.interpreter.summarizer.chunk_s == Rational(1, 2));
  CHECK(f.remote->base_url_overrides.at(Capability::Detect) == "http://d");
}

TEST_CASE("the mock suite is answered correctly end to end") {
  const Engine engine(suite_config());
  const auto dataset = load_dataset(suite_dir() / "dataset.jsonl");
  const auto run = engine.evaluate(dataset);
  REQUIRE(run.records.size() == dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& r = run.records[i];
    CHECK(r.record.question_id == dataset[i].question_id);
    CHECK_MESSAGE(r.outcome == Outcome::Correct, r.record.question_id, ": ", to_string(r.outcome), " ", r.detail,
                  " raw=", r.raw_output, " matched=", r.matched);
    REQUIRE(r.trace.has_value());
    CHECK(r.trace->backend_calls() > 0);
  }
  CHECK(run.report.accuracy() == 1.0);

  // A single worker gives identical records.
  auto cfg = suite_config();
  cfg.workers = 1;
  const Engine serial(cfg);
  const auto again = serial.evaluate(dataset);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    CHECK(again.records[i].to_json() == run.records[i].to_json());
    CHECK(again.records[i].trace->to_jsonl() == run.records[i].trace->to_jsonl());
  }
}

TEST_CASE("invalid generated programs fail before any backend call") {
  const Engine engine(suite_config());
  const auto run = engine.evaluate(load_dataset(suite_dir() / "faulty.jsonl"));
  REQUIRE(run.records.size() == 3);
  for (const auto& r : run.records) {
    CHECK(r.outcome == Outcome::GenerationFailure);
    CHECK_FALSE(r.trace.has_value());
    CHECK(r.to_json()["backend_calls"] == 0);
    CHECK_FALSE(r.detail.empty());
  }
  CHECK(engine.gateway().backend_calls() == 0);
}

TEST_CASE("eval outputs are written and reproducible") {
  const Engine engine(suite_config());
  auto dataset = load_dataset(suite_dir() / "dataset.jsonl");
  for (const auto& r : load_dataset(suite_dir() / "faulty.jsonl")) dataset.push_back(r);
  const auto a = scratch_dir("eval_a"), b = scratch_dir("eval_b");
  write_eval_outputs(engine.evaluate(dataset), a);
  write_eval_outputs(Engine(suite_config()).evaluate(dataset), b);
  for (const auto* name : {"report.json", "records.jsonl", "audit.jsonl"}) {
    CHECK(slurp(a / name) == slurp(b / name));
  }
  std::size_t traces = 0;
  for (const auto& e : std::filesystem::directory_iterator(a / "records")) {
    CHECK(slurp(e.path()) == slurp(b / "records" / e.path().filename()));
    ++traces;
  }
  CHECK(traces == dataset.size());
  const auto report = json::parse(slurp(a / "report.json"));
  CHECK(report["counts"]["generation_failure"] == 3);
  CHECK(slurp(a / "records" / "bad_syntax.jsonl").find("generation_failure") != std::string::npos);
}

TEST_CASE("an injected fault flips answers and shows up in the trace") {
  auto cfg = suite_config();
  cfg.faults.push_back({Capability::ImageQA, Corruption::WrongAnswer, 1.0, {}, 3});
  const Engine engine(cfg);
  const auto run = engine.evaluate(load_dataset(suite_dir() / "dataset.jsonl"));
  std::size_t flipped = 0;
  for (const auto& r : run.records) {
    if (r.outcome == Outcome::Correct) continue;
    ++flipped;
    if (r.trace) CHECK(r.trace->calls_capability(Capability::ImageQA));
  }
  CHECK(flipped > 0);
}

TEST_CASE("kept segments agree with a per-frame scan") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 300; ++t) {
    std::vector<bool> keep(rng() % 40);
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = rng() % 3 != 0;
    const auto segs = kept_segments(keep);
    std::vector<bool> rebuilt(keep.size(), false);
    for (std::size_t s = 0; s < segs.size(); ++s) {
      CHECK(segs[s].start_frame < segs[s].end_frame);
      if (s) CHECK(segs[s].start_frame > segs[s - 1].end_frame);  // maximal: a gap separates runs
      for (auto i = segs[s].start_frame; i < segs[s].end_frame; ++i) rebuilt[static_cast<std::size_t>(i)] = true;
    }
    CHECK(rebuilt == keep);
  }
  CHECK(parse_edit_mode("KEEP") == EditMode::KeepMatching);
  CHECK_THROWS_AS(parse_edit_mode("shuffle"), ConfigError);
}

TEST_CASE("editing and tracking through the engine") {
  auto doc = blank_world("clip", 10, "5");
  for (int i = 0; i < 10; ++i) {
    doc["frames"][i]["qa"] = {{"Is the door open?", i >= 3 && i < 7 ? "yes" : "no"}};
    const double x = 0.1 + 0.02 * i;
    doc["frames"][i]["objects"] = {{"cat", {{{"box", jbox(x, 0.2, x + 0.2, 0.5)}, {"score", 0.95}}}}};
  }
  std::vector<MockWorld> worlds{parse_mock_world(doc)};
  const Engine engine(EngineConfig{}, std::move(worlds));
  const auto video = engine.video("clip");

  const auto removed = edit_video(engine.primitives(), video, "Is the door open?", EditMode::RemoveMatching);
  CHECK(removed.segments == std::vector<Segment>{{0, 3}, {7, 10}});
  CHECK(removed.kept_frames.size() == 6);
  const auto j = removed.to_json(*video);
  CHECK(j["segments"][1]["start_s"] == 1.4);
  CHECK(j["manifest"][0] == "clip/000000");
  const auto kept = edit_video(engine.primitives(), video, "Is the door open?", EditMode::KeepMatching);
  CHECK(kept.segments == std::vector<Segment>{{3, 7}});
  CHECK_THROWS_AS(edit_video(engine.primitives(), video, " ", EditMode::KeepMatching), InvalidArgument);

  CallLog log;
  const auto run = track_video(engine.primitives(), video, "cat", TrackerParams{}, &log);
  CHECK(run.detections == 10);
  REQUIRE(run.tracks.size() == 1);
  CHECK(run.summary()[0]["length"] == 10);
  CHECK(log.total() == 10);
  CHECK(track_video(engine.primitives(), video, "dog", TrackerParams{}).tracks.empty());
  CHECK_THROWS_AS(engine.video("elsewhere"), ConfigError);
}
