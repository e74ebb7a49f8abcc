#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "support.hpp"

using namespace testsupport;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run cli(const std::string& args) {
  static const auto dir = scratch_dir("cli_io");
  const auto out = dir / "stdout", err = dir / "stderr";
  const std::string cmd = quote(cli_path().string()) + " " + args + " >" + quote(out.string()) + " 2>" +
                          quote(err.string());
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string suite_config() { return "--config " + quote((suite_dir() / "config.json").string()); }

}  // namespace

TEST_CASE("query answers a suite question") {
  const auto r = cli(suite_config() +
                        " query --video ski_slope --question \"What color is the skier's jacket?\""
                        " --question-id ski_q1 --type color --explain");
  CHECK_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("trace:") != std::string::npos);
  CHECK(r.out.substr(r.out.rfind('\n', r.out.size() - 2) + 1) == "black\n");
}

TEST_CASE("dry run prints the prompt and program without calling backends") {
  const auto r = cli(suite_config() +
                        " --dry-run query --video ski_slope --question \"What is the person doing?\""
                        " --question-id ski_q3");
  CHECK(r.code == 0);
  CHECK(r.out.find("# Your turn") != std::string::npos);
  CHECK(r.out.find("def answer_question") != std::string::npos);
  CHECK(r.out.find("trace:") == std::string::npos);
}

TEST_CASE("generation failures exit with 2") {
  for (const char* id : {"bad_syntax", "bad_method", "bad_loop", "no_such_fixture"}) {
    const auto r = cli(suite_config() + " gen-program --question \"What is the person doing?\" --question-id " + id);
    CHECK_MESSAGE(r.code == 2, id);
    CHECK(r.err.find("generation_failure") != std::string::npos);
  }
  CHECK(cli(suite_config() + " gen-program --question \"What is the person doing?\" --question-id ski_q3").code ==
        0);
}

TEST_CASE("module failures exit with 3") {
  const auto dir = scratch_dir("cli_module");
  std::ofstream(dir / "world.json") << blank_world("tiny", 4).dump();
  std::filesystem::create_directories(dir / "fx");
  std::ofstream(dir / "fx" / "empty.py") << "def answer_question(video, possible_answers):\n"
                                            "    cars = video.filter_object(\"car\")\n"
                                            "    return cars.get_caption(0)\n";
  const auto r = cli("--mock-world " + quote((dir / "world.json").string()) + " --fixtures " +
                        quote((dir / "fx").string()) + " query --video tiny --question q --question-id empty");
  CHECK(r.code == 3);
  CHECK(r.err.find("module_failure") != std::string::npos);
}

TEST_CASE("configuration errors exit with 4") {
  const auto dir = scratch_dir("cli_config");
  std::ofstream(dir / "unknown.json") << R"({"colour": "red"})";
  std::ofstream(dir / "broken.json") << "{";
  const std::string question = " query --video x --question q";
  CHECK(cli("--config " + quote((dir / "unknown.json").string()) + question).code == 4);
  CHECK(cli("--config " + quote((dir / "broken.json").string()) + question).code == 4);
  CHECK(cli("--config " + quote((dir / "missing.json").string()) + question).code == 4);
  CHECK(cli(suite_config() + " query --video nowhere --question q").code == 4);
  CHECK(cli(suite_config() + " eval --dataset " + quote((dir / "none.jsonl").string())).code == 4);
  CHECK(cli("query --question q").code == 4);
  CHECK(cli(suite_config() + " edit --video ski_slope --predicate p --mode sideways").code == 4);
}

TEST_CASE("eval writes reports that do not change between runs") {
  const auto a = scratch_dir("cli_eval_a"), b = scratch_dir("cli_eval_b");
  const auto dataset = quote((suite_dir() / "dataset.jsonl").string());
  const auto ra = cli(suite_config() + " eval --dataset " + dataset + " --out " + quote(a.string()));
  const auto rb = cli(suite_config() + " eval --dataset " + dataset + " --out " + quote(b.string()));
  REQUIRE_MESSAGE(ra.code == 0, ra.err);
  REQUIRE(rb.code == 0);
  CHECK(ra.out == rb.out);
  CHECK(json::parse(ra.out)["accuracy"] == 1.0);
  CHECK(slurp(a / "records.jsonl") == slurp(b / "records.jsonl"));
  CHECK(slurp(a / "audit.jsonl").empty());
}

TEST_CASE("edit, track and summarize commands") {
  const auto dir = scratch_dir("cli_misc");
  const auto edit = cli(suite_config() +
                           " edit --video ski_slope --predicate \"Is it snowing?\" --mode keep_matching --out " +
                           quote((dir / "edit.json").string()));
  CHECK_MESSAGE(edit.code == 0, edit.err);
  if (edit.code == 0) CHECK(json::parse(slurp(dir / "edit.json"))["video_id"] == "ski_slope");

  const auto track =
      cli(suite_config() + " track --video dance_floor --query dancer --out " + quote((dir / "t.jsonl").string()));
  CHECK_MESSAGE(track.code == 0, track.err);
  CHECK(json::parse(track.out).is_array());
  CHECK_FALSE(slurp(dir / "t.jsonl").empty());

  const auto summary = cli(suite_config() + " summarize --video kitchen");
  CHECK_MESSAGE(summary.code == 0, summary.err);
  if (summary.code == 0) CHECK(json::parse(summary.out)["chunks"].size() == 6);
}
