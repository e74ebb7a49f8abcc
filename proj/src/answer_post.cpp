#include "proviq/answer_post.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "proviq/errors.hpp"
#include "proviq/text.hpp"

namespace proviq {

EmbeddingTable EmbeddingTable::parse(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("embedding table: missing header");
  std::istringstream header(line);
  long long count = 0;
  int dim = 0;
  if (!(header >> count >> dim) || count < 0 || dim <= 0) {
    throw ConfigError("embedding table: header must be 'count dim'");
  }
  EmbeddingTable table(dim);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    std::istringstream row(line);
    std::string token;
    row >> token;
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
      if (!(row >> v(i))) {
        throw ConfigError("embedding table line " + std::to_string(lineno) + ": expected " +
                          std::to_string(dim) + " values");
      }
    }
    table.add(token, v);
  }
  if (static_cast<long long>(table.size()) != count) {
    throw ConfigError("embedding table: header says " + std::to_string(count) + " rows, found " +
                      std::to_string(table.size()));
  }
  return table;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embedding table " + path.string());
  return parse(in);
}

void EmbeddingTable::add(const std::string& token, const Eigen::VectorXd& vec) {
  if (vec.size() != dim_) {
    throw InvalidArgument("embedding for '" + token + "' has dimension " + std::to_string(vec.size()) +
                          ", expected " + std::to_string(dim_));
  }
  vectors_[text::lower(token)] = vec;
}

const Eigen::VectorXd* EmbeddingTable::find(const std::string& token) const {
  auto it = vectors_.find(text::lower(token));
  return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingTable EmbeddingTable::scaled(double factor) const {
  EmbeddingTable out(dim_);
  for (const auto& [tok, v] : vectors_) out.vectors_.emplace(tok, v * factor);
  return out;
}

Eigen::VectorXd embed_phrase(const std::string& phrase, const EmbeddingTable& table) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dim());
  int known = 0;
  for (const auto& tok : text::tokenize(phrase)) {
    if (const auto* v = table.find(tok)) {
      sum += *v;
      ++known;
    }
  }
  if (known > 0) sum /= known;
  return sum;
}

VocabMode parse_vocab_mode(const std::string& name) {
  const auto n = text::lower(name);
  if (n == "none" || n == "full") return VocabMode::None;
  if (n == "top_k" || n == "topk") return VocabMode::TopK;
  if (n == "type_based" || n == "type") return VocabMode::TypeBased;
  throw ConfigError("unknown vocabulary mode '" + name + "'");
}

const char* to_string(VocabMode mode) noexcept {
  switch (mode) {
    case VocabMode::None: return "none";
    case VocabMode::TopK: return "top_k";
    case VocabMode::TypeBased: return "type_based";
  }
  return "?";
}

void Vocabulary::validate() const {
  std::set<std::string> seen;
  for (const auto& a : answers) {
    const auto key = text::canonical_phrase(a);
    if (key.empty()) throw ConfigError("vocabulary contains an empty answer");
    if (!seen.insert(key).second) throw ConfigError("vocabulary answer '" + a + "' is duplicated");
  }
  if (k && *k == 0) throw ConfigError("vocabulary k must be at least 1");
  for (const auto& [type, subset] : by_type) {
    std::set<std::string> sub_seen;
    for (const auto& a : subset) {
      const auto key = text::canonical_phrase(a);
      if (!seen.count(key)) {
        throw ConfigError("answer '" + a + "' of type '" + type + "' is not in the vocabulary");
      }
      if (!sub_seen.insert(key).second) {
        throw ConfigError("answer '" + a + "' is duplicated under type '" + type + "'");
      }
    }
  }
}

std::vector<std::string> Vocabulary::active(VocabMode mode, const std::optional<std::string>& type) const {
  std::vector<std::string> out;
  if (mode == VocabMode::None) {
    out = answers;
  } else {
    const std::size_t n = std::min(answers.size(), k.value_or(answers.size()));
    out.assign(answers.begin(), answers.begin() + static_cast<std::ptrdiff_t>(n));
    if (mode == VocabMode::TypeBased && type) {
      auto it = by_type.find(*type);
      if (it != by_type.end()) {
        std::set<std::string> allowed;
        for (const auto& a : it->second) allowed.insert(text::canonical_phrase(a));
        std::erase_if(out, [&](const std::string& a) { return !allowed.count(text::canonical_phrase(a)); });
      }
    }
  }
  if (out.empty()) {
    throw ConfigError(std::string("active vocabulary is empty (mode ") + to_string(mode) +
                      (type ? ", type " + *type : std::string()) + ")");
  }
  return out;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  Vocabulary v;
  try {
    v.answers = j.at("answers").get<std::vector<std::string>>();
    if (j.contains("k") && !j["k"].is_null()) v.k = j["k"].get<std::size_t>();
    if (j.contains("by_type")) {
      v.by_type = j["by_type"].get<std::map<std::string, std::vector<std::string>>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("vocabulary: ") + e.what());
  }
  v.validate();
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open vocabulary " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("vocabulary " + path.string() + ": " + e.what());
  }
}

nlohmann::json Vocabulary::to_json() const {
  nlohmann::json j{{"answers", answers}, {"by_type", by_type}};
  if (k) j["k"] = *k;
  return j;
}

Vocabulary build_vocab(const std::vector<std::pair<std::string, std::string>>& answers_with_type,
                       std::size_t k, VocabMode mode) {
  if (k == 0) throw ConfigError("vocabulary size K must be at least 1");
  if (answers_with_type.empty()) throw ConfigError("cannot build a vocabulary from no answers");

  std::vector<std::pair<std::string, std::size_t>> counts;  // first-occurrence order
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& [answer, type] : answers_with_type) {
    const auto key = text::canonical_phrase(answer);
    if (key.empty()) continue;
    auto [it, fresh] = slot.emplace(key, counts.size());
    if (fresh) counts.emplace_back(key, 0);
    ++counts[it->second].second;
  }
  if (counts.empty()) throw ConfigError("cannot build a vocabulary from empty answers");
  std::stable_sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary v;
  for (const auto& [key, n] : counts) v.answers.push_back(key);
  v.k = k;
  if (mode == VocabMode::TypeBased) {
    const std::size_t n = std::min(k, v.answers.size());
    std::set<std::string> top(v.answers.begin(), v.answers.begin() + static_cast<std::ptrdiff_t>(n));
    std::map<std::string, std::set<std::string>> members;
    for (const auto& [answer, type] : answers_with_type) {
      if (type.empty()) continue;
      const auto key = text::canonical_phrase(answer);
      if (top.count(key)) members[type].insert(key);
    }
    for (const auto& [type, set] : members) {
      auto& list = v.by_type[type];
      for (const auto& a : v.answers) {
        if (set.count(a)) list.push_back(a);
      }
    }
  }
  return v;
}

AnswerMatcher::AnswerMatcher(Vocabulary vocab, const EmbeddingTable& table) : vocab_(std::move(vocab)), table_(table) {
  vocab_.validate();
  for (const auto& a : vocab_.answers) embedded_.emplace(a, embed_phrase(a, table_));
}

MatchResult AnswerMatcher::match(const std::string& raw, const std::optional<std::string>& type,
                                 VocabMode mode) const {
  const auto candidates = vocab_.active(mode, type);
  const auto key = text::canonical_phrase(raw);
  for (const auto& c : candidates) {
    if (text::canonical_phrase(c) == key) return MatchResult{c, 1.0, true, false};
  }
  const Eigen::VectorXd q = embed_phrase(raw, table_);
  if (q.isZero(0.0)) return MatchResult{candidates.front(), 0.0, false, true};

  MatchResult best{candidates.front(), cosine(q, embedded_.at(candidates.front())), false, false};
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double s = cosine(q, embedded_.at(candidates[i]));
    if (s > best.similarity) best = MatchResult{candidates[i], s, false, false};
  }
  return best;
}

MatchResult match(const std::string& raw, const Vocabulary& vocab, const std::optional<std::string>& type,
                  VocabMode mode, const EmbeddingTable& table) {
  return AnswerMatcher(vocab, table).match(raw, type, mode);
}

}  // namespace proviq
