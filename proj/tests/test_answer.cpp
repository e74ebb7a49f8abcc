#include <random>
#include <sstream>

#include "answer_oracle.hpp"
#include "doctest.h"
#include "proviq/errors.hpp"
#include "support.hpp"

using namespace proviq;
using namespace testsupport;

namespace {

std::string random_query(std::mt19937_64& rng, const AnswerWorld& w) {
  const int n = 1 + static_cast<int>(rng() % 4);
  std::string q;
  for (int k = 0; k < n; ++k) {
    q += k ? " " : "";
    q += rng() % 6 == 0 ? "unknownword" : w.tokens[rng() % w.tokens.size()];
  }
  return q;
}

}  // namespace

TEST_CASE("embedding table parsing") {
  std::istringstream ok("2 3\nRed 1 0 0\nblue 0 1 0\n\n");
  const auto t = EmbeddingTable::parse(ok);
  CHECK(t.size() == 2);
  CHECK(t.dim() == 3);
  REQUIRE(t.find("RED") != nullptr);
  CHECK((*t.find("red"))(0) == 1.0);
  std::istringstream short_row("1 3\nred 1 0\n");
  CHECK_THROWS_AS(EmbeddingTable::parse(short_row), ConfigError);
  std::istringstream wrong_count("3 3\nred 1 0 0\n");
  CHECK_THROWS_AS(EmbeddingTable::parse(wrong_count), ConfigError);
  std::istringstream empty("");
  CHECK_THROWS_AS(EmbeddingTable::parse(empty), ConfigError);
  CHECK_THROWS_AS(EmbeddingTable(2).add("x", Eigen::VectorXd::Zero(3)), InvalidArgument);
  CHECK(EmbeddingTable::load(suite_dir() / "embeddings.txt").dim() == 16);
}

TEST_CASE("phrase embedding averages known tokens") {
  EmbeddingTable t(2);
  t.add("a", Eigen::Vector2d(1, 0));
  t.add("b", Eigen::Vector2d(0, 3));
  CHECK(embed_phrase("a b zzz", t).isApprox(Eigen::Vector2d(0.5, 1.5)));
  CHECK(embed_phrase("zzz", t).isZero(0));
  CHECK(cosine(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)) == 0.0);
}

TEST_CASE("every vocabulary entry is a fixed point") {
  const auto w = make_answer_world(1, 1000);
  Vocabulary v;
  v.answers = w.vocab;
  const AnswerMatcher m(v, w.table);
  for (const auto& a : w.vocab) {
    const auto r = m.match(a, std::nullopt, VocabMode::None);
    CHECK(r.answer == a);
    CHECK(r.shortcut);
    CHECK(m.match("  " + a + ". ", std::nullopt, VocabMode::None).answer == a);
  }
}

TEST_CASE("nearest answer agrees with a brute-force cosine scan") {
  const auto w = make_answer_world(2, 1000);
  Vocabulary v;
  v.answers = w.vocab;
  const AnswerMatcher m(v, w.table);
  std::mt19937_64 rng(3);
  int degenerate = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto q = random_query(rng, w);
    const auto got = m.match(q, std::nullopt, VocabMode::None);
    if (got.shortcut) {
      CHECK(got.answer == q);
      continue;
    }
    if (got.degenerate) {
      ++degenerate;
      CHECK(got.answer == w.vocab.front());
      continue;
    }
    const auto expect = oracle_nearest(w, q, w.vocab, 16);
    CHECK(got.similarity == doctest::Approx(expect.similarity).epsilon(1e-12));
    if (got.answer != w.vocab[expect.index]) {
      // Only a numerical tie may pick a different entry.
      const auto alt = oracle_cosine(oracle_embed(w, q, 16), oracle_embed(w, got.answer, 16));
      CHECK(alt == doctest::Approx(expect.similarity).epsilon(1e-12));
    }
  }
  CHECK(degenerate < 100);
}

TEST_CASE("uniform scaling of all vectors changes nothing") {
  const auto w = make_answer_world(4, 300);
  const auto scaled = w.table.scaled(3.7);
  Vocabulary v;
  v.answers = w.vocab;
  const AnswerMatcher a(v, w.table), b(v, scaled);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto q = random_query(rng, w);
    const auto ra = a.match(q, std::nullopt, VocabMode::None);
    const auto rb = b.match(q, std::nullopt, VocabMode::None);
    CHECK(ra.answer == rb.answer);
    CHECK(ra.similarity == doctest::Approx(rb.similarity).epsilon(1e-12));
  }
}

TEST_CASE("vocabulary modes nest: type_based within top_k within full") {
  std::mt19937_64 rng(6);
  const auto w = make_answer_world(7, 60);
  std::vector<std::pair<std::string, std::string>> labelled;
  const std::vector<std::string> types = {"color", "count", "object", ""};
  for (int i = 0; i < 400; ++i) {
    // Skewed frequencies so the ranking is informative.
    const auto idx = std::min<std::size_t>(w.vocab.size() - 1, static_cast<std::size_t>(std::abs(
                                                                    std::normal_distribution<double>(0, 15)(rng))));
    labelled.emplace_back(w.vocab[idx], types[idx % types.size()]);
  }
  for (std::size_t k : {1, 5, 20, 100}) {
    const auto v = build_vocab(labelled, k, VocabMode::TypeBased);
    v.validate();
    const auto full = v.active(VocabMode::None, std::nullopt);
    const auto topk = v.active(VocabMode::TopK, std::nullopt);
    CHECK(topk.size() == std::min(k, full.size()));
    CHECK(std::equal(topk.begin(), topk.end(), full.begin()));
    const AnswerMatcher m(v, w.table);
    for (const auto& t : types) {
      if (t.empty()) continue;
      std::vector<std::string> typed;
      try {
        typed = v.active(VocabMode::TypeBased, t);
      } catch (const ConfigError&) {
        continue;  // no answers of this type made the cut
      }
      for (const auto& a : typed) CHECK(std::find(topk.begin(), topk.end(), a) != topk.end());
      for (int i = 0; i < 30; ++i) {
        const auto r = m.match(random_query(rng, w), t, VocabMode::TypeBased);
        CHECK(std::find(typed.begin(), typed.end(), r.answer) != typed.end());
      }
    }
  }
}

TEST_CASE("build_vocab ranks by frequency with first-seen tie breaks") {
  const auto v = build_vocab({{"Red", "color"}, {"two", "count"}, {"red.", "color"}, {"blue", "color"},
                              {"two", "count"}, {"cat", "object"}, {"Blue", "color"}},
                             3, VocabMode::TypeBased);
  CHECK(v.answers == std::vector<std::string>{"red", "two", "blue", "cat"});
  CHECK(v.by_type.at("color") == std::vector<std::string>{"red", "blue"});
  CHECK(v.by_type.count("object") == 0);
  CHECK(v.active(VocabMode::TypeBased, "object") == std::vector<std::string>{"red", "two", "blue"});
  CHECK(Vocabulary::from_json(v.to_json()).answers == v.answers);
  CHECK_THROWS_AS(build_vocab({}, 3, VocabMode::TopK), ConfigError);
  CHECK_THROWS_AS(build_vocab({{"a", ""}}, 0, VocabMode::TopK), ConfigError);
}

TEST_CASE("vocabulary validation") {
  Vocabulary v;
  v.answers = {"red", "Red."};
  CHECK_THROWS_AS(v.validate(), ConfigError);
  v.answers = {"red", "blue"};
  v.by_type["color"] = {"green"};
  CHECK_THROWS_AS(v.validate(), ConfigError);
  v.by_type["color"] = {"red"};
  v.validate();
  CHECK_THROWS_AS(parse_vocab_mode("fuzzy"), ConfigError);
  CHECK(parse_vocab_mode("full") == VocabMode::None);
  const auto suite = Vocabulary::load(suite_dir() / "vocab.json");
  CHECK(suite.answers.size() > 20);
}

TEST_CASE("suite synonyms map to vocabulary answers") {
  const auto table = EmbeddingTable::load(suite_dir() / "embeddings.txt");
  const auto vocab = Vocabulary::load(suite_dir() / "vocab.json");
  const AnswerMatcher m(vocab, table);
  CHECK(m.match("crimson", std::string("color"), VocabMode::TypeBased).answer == "red");
  CHECK(m.match("a toy", std::string("object"), VocabMode::TypeBased).answer == "bear");
  const auto none = m.match("qwerty", std::string("color"), VocabMode::TypeBased);
  CHECK(none.degenerate);
}
