#include <random>
#include <regex>

#include "doctest.h"
#include "program_gen.hpp"
#include "proviq/errors.hpp"
#include "proviq/lang.hpp"

using namespace proviq;
using namespace proviq::lang;

namespace {

const std::string kMinimal = "def answer_question(video, possible_answers):\n    return 1\n";

std::string source_of(const std::string& name) {
  for (const auto& p : testsupport::listing_programs()) {
    if (p.name == name) return p.source;
  }
  FAIL("no program " << name);
  return {};
}

bool has_violation(const ValidationReport& r, const std::string& needle) {
  for (const auto& v : r.violations) {
    if (v.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("minimal program parses to a single return") {
  const auto p = parse(kMinimal);
  CHECK(p.entry_name == "answer_question");
  CHECK(p.params == std::vector<std::string>{"video", "possible_answers"});
  REQUIRE(p.body.size() == 1);
  CHECK(std::holds_alternative<Return>(p.body[0].node));
  CHECK(validate(p, TaskKind::QA).ok());
  CHECK(render(p) == kMinimal);
}

TEST_CASE("skier example has five statements and validates") {
  const auto p = parse(source_of("skier"));
  CHECK(p.entry_name == "answer_question");
  CHECK(p.body.size() == 5);
  CHECK(validate(p, TaskKind::QA).ok());
  CHECK(called_operations(p) == std::set<std::string>{"filter_object", "find", "video_query", "get_max_key"});
}

TEST_CASE("toy bear example parses with its trailing comment") {
  const auto p = parse(source_of("toy_bear"));
  CHECK(p.body.size() == 7);
  CHECK(validate(p, TaskKind::MultipleChoice).ok());
  const auto& first = std::get<Assign>(p.body[0].node);
  CHECK(first.target == "vid_seg");
  CHECK(render(first.value) == "video.trim(0, len(video) // 4)");
}

TEST_CASE("party example reads an undefined name") {
  const auto p = parse(source_of("party"));
  const auto report = validate(p, TaskKind::QA);
  REQUIRE_FALSE(report.ok());
  CHECK(has_violation(report, "use before assignment: 'vid_segment'"));
  CHECK(report.violations.front().pos.line == 3);
}

TEST_CASE("forbidden constructs are rejected with positions") {
  try {
    parse("def answer_question(video, possible_answers):\n    import os\n    return 1\n");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.col() == 5);
    CHECK(e.message().find("import") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("x = 1\n"), SyntaxError);
  CHECK_THROWS_AS(parse(kMinimal + "def b():\n    return 2\n"), SyntaxError);
  CHECK_THROWS_AS(parse("def f(a=1):\n    return a\n"), SyntaxError);
  CHECK_THROWS_AS(parse("def f(v):\n    return v[1:2]\n"), SyntaxError);
  CHECK_THROWS_AS(parse("def f(v):\n    return \"abc\n"), SyntaxError);
  CHECK_THROWS_AS(parse("def f(v):\n    return 1.5\n"), SyntaxError);
  CHECK_THROWS_AS(parse("def f(v):\n    return (1\n"), SyntaxError);
  CHECK_THROWS_AS(parse("def f(v):\n  x = 1\n    return x\n"), SyntaxError);
}

TEST_CASE("unknown method is reported by name") {
  const auto p = parse("def answer_question(video, possible_answers):\n    return video.download()\n");
  const auto r = validate(p, TaskKind::QA);
  CHECK(has_violation(r, "unknown method: download"));
  CHECK(r.violations[0].pos.line == 2);
}

TEST_CASE("return must appear on every path") {
  const std::string src =
      "def answer_question(video, possible_answers):\n"
      "    if video.num_frames > 3:\n"
      "        return \"many\"\n";
  CHECK(has_violation(validate(parse(src), TaskKind::QA), "missing return path"));
  const std::string both =
      "def answer_question(video, possible_answers):\n"
      "    if video.num_frames > 3:\n"
      "        return \"many\"\n"
      "    else:\n"
      "        return \"few\"\n";
  CHECK(validate(parse(both), TaskKind::QA).ok());
  const std::string elif =
      "def answer_question(video, possible_answers):\n"
      "    if video.num_frames > 3:\n"
      "        return \"many\"\n"
      "    elif video.num_frames > 1:\n"
      "        return \"some\"\n"
      "    return \"few\"\n";
  CHECK(validate(parse(elif), TaskKind::QA).ok());
}

TEST_CASE("definitions must reach every use") {
  const std::string one_branch =
      "def answer_question(video, possible_answers):\n"
      "    if video.num_frames > 3:\n"
      "        x = 1\n"
      "    return x\n";
  CHECK(has_violation(validate(parse(one_branch), TaskKind::QA), "use before assignment: 'x'"));
  const std::string both_branches =
      "def answer_question(video, possible_answers):\n"
      "    if video.num_frames > 3:\n"
      "        x = 1\n"
      "    else:\n"
      "        x = 2\n"
      "    return x\n";
  CHECK(validate(parse(both_branches), TaskKind::QA).ok());
  const std::string early_return =
      "def answer_question(video, possible_answers):\n"
      "    if video.num_frames > 3:\n"
      "        return 0\n"
      "    else:\n"
      "        x = 2\n"
      "    return x\n";
  CHECK(validate(parse(early_return), TaskKind::QA).ok());
}

TEST_CASE("unreachable code is still checked against the whitelist") {
  const std::string src =
      "def answer_question(video, possible_answers):\n"
      "    return 1\n"
      "    x = video.download()\n";
  CHECK(has_violation(validate(parse(src), TaskKind::QA), "unknown method: download"));
}

TEST_CASE("entry signature depends on task kind") {
  const auto qa = parse(kMinimal);
  CHECK(validate(qa, TaskKind::MultipleChoice).ok());
  CHECK(has_violation(validate(qa, TaskKind::Edit), "wrong entry signature"));
  const auto run = parse("def run(video):\n    return video.filter_property(\"Is it raining?\")\n");
  CHECK(validate(run, TaskKind::Edit).ok());
  CHECK(validate(run, TaskKind::Track).ok());
  CHECK(has_violation(validate(run, TaskKind::QA), "wrong entry signature"));
  CHECK(parse_task_kind("mc") == TaskKind::MultipleChoice);
  CHECK_THROWS_AS(parse_task_kind("poem"), InvalidArgument);
}

TEST_CASE("arity, attributes and builtins are checked") {
  auto check = [](const std::string& expr, const std::string& needle) {
    const auto p = parse("def answer_question(video, possible_answers):\n    return " + expr + "\n");
    CHECK_MESSAGE(has_violation(validate(p, TaskKind::QA), needle), expr);
  };
  check("video.trim(1)", "wrong argument count for trim: expected 2, got 1");
  check("video.video_query()", "expected 1-2");
  check("video.fps", "unknown attribute: fps");
  check("sorted(possible_answers)", "unknown function: sorted");
  check("len(video, video)", "wrong argument count for len");
  const auto p = parse("def answer_question(video, possible_answers):\n    len = 2\n    return len\n");
  CHECK(has_violation(validate(p, TaskKind::QA), "cannot assign to builtin"));
}

TEST_CASE("map literals keep pair order") {
  const auto p = parse("def run(video):\n    return {\"b\": 1, \"a\": 2, \"c\": 3}\n");
  const auto& ret = std::get<Return>(p.body[0].node);
  const auto& m = std::get<MapLiteral>(ret.value.node);
  REQUIRE(m.pairs.size() == 3);
  CHECK(std::get<std::string>(std::get<Literal>(m.pairs[0].first.node).value) == "b");
  CHECK(render(ret.value) == "{\"b\": 1, \"a\": 2, \"c\": 3}");
}

TEST_CASE("operator precedence and rendering") {
  auto round = [](const std::string& expr) {
    const auto p = parse("def run(video):\n    return " + expr + "\n");
    return render(std::get<Return>(p.body[0].node).value);
  };
  CHECK(round("1 + 2 * 3") == "1 + 2 * 3");
  CHECK(round("(1 + 2) * 3") == "(1 + 2) * 3");
  CHECK(round("1 - (2 - 3)") == "1 - (2 - 3)");
  CHECK(round("(1 - 2) - 3") == "1 - 2 - 3");
  CHECK(round("not a == b") == "not a == b");
  CHECK(round("(not a) == b") == "(not a) == b");
  CHECK(round("a or b and c") == "a or b and c");
  CHECK(round("(a or b) and c") == "(a or b) and c");
  CHECK(round("x * -3") == "x * -3");
  CHECK(round("(-3).num_frames") == "(-3).num_frames");
  CHECK(round("'it\\'s'") == "\"it's\"");
  CHECK_THROWS_AS(round("-x"), SyntaxError);
}

TEST_CASE("nested if program round-trips") {
  const std::string src =
      "def run(video):\n"
      "    if video.num_frames > 10:\n"
      "        if len(video) // 2 == 5:\n"
      "            return 1\n"
      "        else:\n"
      "            x = [1, 2]\n"
      "    return 0\n";
  const auto p = parse(src);
  CHECK(render(p) == src);
  CHECK(parse(render(p)) == p);
}

TEST_CASE("random programs round-trip through render and parse") {
  testsupport::AstGenerator gen(2024);
  for (int i = 0; i < 1500; ++i) {
    const auto p = gen.program();
    const auto text = render(p);
    Program back;
    try {
      back = parse(text);
    } catch (const SyntaxError& e) {
      FAIL("render produced unparseable text: " << e.what() << "\n" << text);
    }
    CHECK_MESSAGE(back == p, text);
    CHECK(render(back) == text);
  }
}

TEST_CASE("mutated corpus is fully rejected") {
  const auto corpus = testsupport::mutated_programs();
  CHECK(corpus.size() >= 50);
  for (const auto& m : corpus) {
    bool rejected = false;
    int line = 0;
    try {
      const auto p = parse(m.source);
      const auto r = validate(p, TaskKind::QA);
      if (!r.ok()) {
        rejected = true;
        line = r.violations.front().pos.line;
      }
    } catch (const SyntaxError& e) {
      rejected = true;
      line = e.line();
    }
    CHECK_MESSAGE(rejected, m.name);
    CHECK_MESSAGE(line >= 1, m.name);
  }
}

TEST_CASE("accepted programs only name whitelisted operations") {
  // Rename call sites of valid programs at random, mixing whitelisted and foreign names.
  const std::vector<std::string> names = {"filter_property", "find", "video_query", "trim", "get_caption",
                                          "len", "get_max_key", "download", "system", "open", "exec_",
                                          "__import__", "getattr", "remove"};
  const std::regex call(R"(([A-Za-z_][A-Za-z_0-9]*)\()");
  std::mt19937_64 rng(7);
  int accepted = 0, rejected = 0;
  for (int i = 0; i < 2000; ++i) {
    const std::string base = testsupport::listing_programs()[1 + i % 3].source;
    std::string out;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(base.begin(), base.end(), call); it != std::sregex_iterator(); ++it) {
      const auto& m = *it;
      out += base.substr(last, m.position(1) - last);
      const bool keep = m.str(1) == "answer_question" || rng() % 3 == 0;
      out += keep ? m.str(1) : names[rng() % names.size()];
      last = m.position(1) + m.length(1);
    }
    out += base.substr(last);
    Program p;
    try {
      p = parse(out);
    } catch (const SyntaxError&) {
      ++rejected;
      continue;
    }
    if (!validate(p, TaskKind::QA).ok()) {
      ++rejected;
      continue;
    }
    ++accepted;
    for (const auto& op : called_operations(p)) {
      CHECK_MESSAGE((is_whitelisted_method(op) || is_whitelisted_builtin(op)), out);
    }
  }
  CHECK(accepted > 0);
  CHECK(rejected > 0);
}
