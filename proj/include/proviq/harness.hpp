#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "proviq/answer_post.hpp"
#include "proviq/codegen.hpp"
#include "proviq/gateway.hpp"
#include "proviq/interpreter.hpp"
#include "proviq/mock_world.hpp"
#include "proviq/primitives.hpp"

namespace proviq {

struct BenchmarkRecord {
  std::string question_id;
  std::string video_id;
  std::string question;
  std::optional<std::string> type;
  std::vector<std::string> options;  // non-empty iff multiple choice
  std::vector<std::string> answers;

  bool multiple_choice() const noexcept { return !options.empty(); }
  nlohmann::json to_json() const;
};

/// One JSON object per line. Throws ConfigError naming the offending line.
std::vector<BenchmarkRecord> parse_dataset(std::istream& in);
std::vector<BenchmarkRecord> load_dataset(const std::filesystem::path& path);

enum class Outcome { Correct, GenerationFailure, ModuleFailure, PostprocessMismatch, WrongAnswer };
inline constexpr Outcome kAllOutcomes[] = {Outcome::Correct, Outcome::GenerationFailure, Outcome::ModuleFailure,
                                           Outcome::PostprocessMismatch, Outcome::WrongAnswer};
const char* to_string(Outcome outcome) noexcept;

struct EvalRecord {
  BenchmarkRecord record;
  std::string prompt_fingerprint;
  std::string program;
  std::optional<ExecTrace> trace;  // absent on generation failure
  std::string raw_output;
  std::string matched;
  Outcome outcome = Outcome::WrongAnswer;
  std::string detail;

  nlohmann::json to_json() const;
};

struct TypeScore {
  std::size_t total = 0;
  std::size_t correct = 0;
};

struct EvalReport {
  std::size_t total = 0;
  std::map<Outcome, std::size_t> counts;
  std::map<std::string, TypeScore> by_type;

  double accuracy() const noexcept;
  nlohmann::json to_json() const;
};

EvalReport summarize_records(const std::vector<EvalRecord>& records);

/// Ground-truth comparison and outcome rules, shared with the tests.
Outcome classify(const std::vector<std::string>& answers, const std::string& raw, const std::string& matched);

struct EngineConfig {
  std::filesystem::path base_dir = ".";
  std::vector<std::filesystem::path> mock_worlds;
  std::optional<std::filesystem::path> videos_dir;  // frame directories named by video id
  std::optional<RemoteOptions> remote;
  std::size_t max_concurrency = 8;
  std::optional<std::filesystem::path> cache_path;
  PrimitiveConfig primitives;
  InterpreterConfig interpreter;
  std::int64_t sample_frames = 60;
  std::size_t k_examples = 4;
  bool live = false;
  std::optional<std::filesystem::path> fixtures;
  std::optional<std::filesystem::path> example_pool;
  std::set<std::string> api_include;
  std::set<std::string> api_exclude;
  LiveGenerationOptions generation;
  std::optional<std::filesystem::path> embeddings;
  std::optional<std::filesystem::path> vocab;
  VocabMode vocab_mode = VocabMode::TopK;
  std::size_t workers = 4;
  std::uint64_t seed = 0;
  std::vector<FaultSpec> faults;
};

/// Relative paths resolve against `base_dir`. Throws ConfigError.
EngineConfig parse_engine_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
EngineConfig load_engine_config(const std::filesystem::path& path);

struct EvalRun {
  EvalReport report;
  std::vector<EvalRecord> records;  // dataset order
};

/// Everything needed to answer questions: backends, prompt material and post-processing.
class Engine {
 public:
  /// Loads worlds, tables and pools named in the config. Throws ConfigError.
  explicit Engine(EngineConfig config);
  /// Uses the given worlds in place of `config.mock_worlds`.
  Engine(EngineConfig config, std::vector<MockWorld> worlds);
  Engine(Engine&&) = delete;
  Engine& operator=(Engine&&) = delete;

  const EngineConfig& config() const noexcept { return config_; }
  Gateway& gateway() const noexcept { return *gateway_; }
  const Primitives& primitives() const noexcept { return *primitives_; }
  const ApiDoc& api() const noexcept { return api_; }

  std::shared_ptr<const SourceVideo> video(const std::string& video_id) const;

  PromptBundle prompt_for(const std::string& question, const std::vector<std::string>& options,
                          lang::TaskKind task) const;
  /// Fixture replay (by question id, then fingerprint) or live generation.
  GeneratedProgram generate(const PromptBundle& bundle, const std::string& question_id) const;

  /// Maps a program result onto the answer space of the record.
  std::pair<std::string, std::string> postprocess(const Value& value, const BenchmarkRecord& record) const;

  EvalRecord run_record(const BenchmarkRecord& record) const;
  EvalRun evaluate(const std::vector<BenchmarkRecord>& dataset) const;

 private:
  void init(std::vector<MockWorld> worlds);

  EngineConfig config_;
  std::unique_ptr<Gateway> gateway_;
  std::unique_ptr<Primitives> primitives_;
  std::shared_ptr<MockBackend> mock_;
  ApiDoc api_;
  ExamplePool pool_;
  EmbeddingTable table_{1};
  std::optional<AnswerMatcher> matcher_;
  std::optional<FixtureStore> fixtures_;
  std::map<std::string, std::shared_ptr<const SourceVideo>> videos_;
};

/// Writes report.json, records.jsonl, records/<question_id>.jsonl and audit.jsonl.
void write_eval_outputs(const EvalRun& run, const std::filesystem::path& out_dir, bool include_timings = false);

// ---------------------------------------------------------------------------
// Editing

enum class EditMode { RemoveMatching, KeepMatching };
EditMode parse_edit_mode(const std::string& name);

struct Segment {
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;  // exclusive
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Maximal runs of kept frames.
std::vector<Segment> kept_segments(const std::vector<bool>& keep);

struct EditResult {
  std::vector<Segment> segments;
  std::vector<FrameRef> kept_frames;
  nlohmann::json to_json(const SourceVideo& video) const;
};

/// Evaluates the predicate on every frame of `video`.
EditResult edit_video(const Primitives& primitives, const std::shared_ptr<const SourceVideo>& video,
                      const std::string& predicate, EditMode mode, CallLog* log = nullptr);

// ---------------------------------------------------------------------------
// Tracking

struct TrackRun {
  std::vector<Track> tracks;
  std::size_t detections = 0;
  nlohmann::json summary() const;
};

/// DETECT on every frame, then track. Detections below the tracker's low threshold are dropped.
TrackRun track_video(const Primitives& primitives, const std::shared_ptr<const SourceVideo>& video,
                     const std::string& query, const TrackerParams& params, CallLog* log = nullptr);

}  // namespace proviq
