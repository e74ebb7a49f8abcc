#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

namespace proviq {

/// Cosine similarity; 0 when either side is the zero vector.
template <typename A, typename B>
double cosine(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

/// Static token vectors of one dimension. Tokens are stored lowercased.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim = 0) : dim_(dim) {}

  /// Text format: "count dim" header, then "token v1 ... vd" per line.
  static EmbeddingTable parse(std::istream& in);
  static EmbeddingTable load(const std::filesystem::path& path);

  void add(const std::string& token, const Eigen::VectorXd& vec);
  const Eigen::VectorXd* find(const std::string& token) const;

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }

  EmbeddingTable scaled(double factor) const;

 private:
  int dim_;
  std::unordered_map<std::string, Eigen::VectorXd> vectors_;
};

/// Mean of the known token vectors; the zero vector when none are known.
Eigen::VectorXd embed_phrase(const std::string& phrase, const EmbeddingTable& table);

enum class VocabMode { None, TopK, TypeBased };
VocabMode parse_vocab_mode(const std::string& name);
const char* to_string(VocabMode mode) noexcept;

/// Answers in rank order, an optional size bound and per-type answer subsets.
struct Vocabulary {
  std::vector<std::string> answers;
  std::optional<std::size_t> k;
  std::map<std::string, std::vector<std::string>> by_type;

  /// Checks uniqueness (by canonical phrase) and that every typed answer is listed.
  void validate() const;
  /// The candidate list for a mode. A type absent from by_type falls back to top-K.
  std::vector<std::string> active(VocabMode mode, const std::optional<std::string>& type) const;

  static Vocabulary from_json(const nlohmann::json& j);
  static Vocabulary load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// Ranks answers by frequency (ties by first occurrence). With TypeBased, also records
/// each type's answers that fall inside the top K.
Vocabulary build_vocab(const std::vector<std::pair<std::string, std::string>>& answers_with_type,
                       std::size_t k, VocabMode mode);

struct MatchResult {
  std::string answer;
  double similarity = 0;
  bool shortcut = false;
  bool degenerate = false;  // raw phrase had no known tokens
};

/// Nearest-answer lookup with cached vocabulary embeddings. Immutable after construction.
class AnswerMatcher {
 public:
  AnswerMatcher(Vocabulary vocab, const EmbeddingTable& table);

  MatchResult match(const std::string& raw, const std::optional<std::string>& type, VocabMode mode) const;
  const Vocabulary& vocabulary() const noexcept { return vocab_; }

 private:
  Vocabulary vocab_;
  const EmbeddingTable& table_;
  std::unordered_map<std::string, Eigen::VectorXd> embedded_;
};

MatchResult match(const std::string& raw, const Vocabulary& vocab, const std::optional<std::string>& type,
                  VocabMode mode, const EmbeddingTable& table);

}  // namespace proviq
