#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "proviq/answer_post.hpp"
#include "proviq/ast.hpp"
#include "proviq/gateway.hpp"
#include "proviq/lang.hpp"

namespace proviq {

struct ApiEntry {
  std::string name;
  std::string doc;  // rendered verbatim, already indented
  bool included = true;
};

/// The API listing shown to the program generator.
class ApiDoc {
 public:
  /// Every method and builtin; get_summary starts excluded.
  static ApiDoc standard();

  const std::vector<ApiEntry>& entries() const noexcept { return entries_; }
  /// Throws ConfigError for unknown names.
  void set_included(const std::string& name, bool included);
  bool included(const std::string& name) const;
  std::set<std::string> included_names() const;

  std::string render() const;

 private:
  std::vector<ApiEntry> entries_;
};

struct PoolExample {
  std::string question;
  std::string program;
  lang::TaskKind task = lang::TaskKind::QA;
  std::string split;
};

/// In-context examples. Every program parses and validates; test-split entries are refused.
class ExamplePool {
 public:
  ExamplePool() = default;
  explicit ExamplePool(std::vector<PoolExample> examples);

  static ExamplePool from_json(const nlohmann::json& j);
  static ExamplePool load(const std::filesystem::path& path);

  const std::vector<PoolExample>& examples() const noexcept { return examples_; }
  std::size_t size() const noexcept { return examples_.size(); }

 private:
  std::vector<PoolExample> examples_;
};

/// Top-k by question-embedding cosine, descending; ties keep pool order.
std::vector<PoolExample> select_examples(const std::string& question, const ExamplePool& pool, std::size_t k,
                                         const EmbeddingTable& table);

struct PromptBundle {
  std::string api_text;
  std::vector<PoolExample> examples;
  std::string question;
  std::vector<std::string> options;
  lang::TaskKind task = lang::TaskKind::QA;
  std::string text;
  std::string fingerprint;  // SHA-256 of text
};

PromptBundle build_prompt(const ApiDoc& api, const std::vector<PoolExample>& examples, const std::string& question,
                          const std::vector<std::string>& options, lang::TaskKind task = lang::TaskKind::QA);

/// Directory of stored programs named `<key>.py`.
class FixtureStore {
 public:
  explicit FixtureStore(std::filesystem::path dir);
  std::optional<std::string> lookup(const std::string& key) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// Body of the first fenced block, or the whole text when there is none.
std::string strip_code_fences(const std::string& text);

struct GeneratedProgram {
  std::string source;
  lang::Program program;
  int attempts = 1;
  std::vector<std::string> diagnostics;  // from rejected attempts
};

/// Parse + validate; returns the diagnostic on failure.
std::optional<std::string> check_program(const std::string& source, lang::TaskKind task, lang::Program* out);

/// Replays the fixture stored under `question_id`, falling back to the prompt fingerprint.
/// Throws GenerationFailure when absent or invalid.
GeneratedProgram generate_from_fixture(const PromptBundle& bundle, const FixtureStore& store,
                                       const std::string& question_id);

struct LiveGenerationOptions {
  int max_tokens = 512;
  double temperature = 0.0;
};

/// Asks LLM_COMPLETE for a program; one retry with the diagnostic appended. Throws
/// GenerationFailure after the retry.
GeneratedProgram generate_live(const PromptBundle& bundle, Gateway& gateway, const LiveGenerationOptions& options = {},
                               CallLog* log = nullptr);

}  // namespace proviq
