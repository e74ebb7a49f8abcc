#include "proviq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "proviq/errors.hpp"
#include "proviq/text.hpp"

namespace proviq {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Dataset

json BenchmarkRecord::to_json() const {
  json j{{"question_id", question_id}, {"video_id", video_id}, {"question", question}, {"answers", answers}};
  if (type) j["type"] = *type;
  if (!options.empty()) j["options"] = options;
  return j;
}

std::vector<BenchmarkRecord> parse_dataset(std::istream& in) {
  std::vector<BenchmarkRecord> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const std::string where = "dataset line " + std::to_string(lineno) + ": ";
    BenchmarkRecord r;
    try {
      const json j = json::parse(line);
      r.question_id = j.at("question_id").is_string() ? j["question_id"].get<std::string>()
                                                       : j["question_id"].dump();
      r.video_id = j.at("video_id").get<std::string>();
      r.question = j.at("question").get<std::string>();
      if (j.contains("type") && !j["type"].is_null()) r.type = j["type"].get<std::string>();
      if (j.contains("options") && !j["options"].is_null()) r.options = j["options"].get<std::vector<std::string>>();
      const auto& a = j.at("answers");
      r.answers = a.is_string() ? std::vector<std::string>{a.get<std::string>()} : a.get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw ConfigError(where + e.what());
    }
    if (r.question_id.empty()) throw ConfigError(where + "empty question_id");
    if (r.answers.empty()) throw ConfigError(where + "no ground-truth answers");
    if (!ids.insert(r.question_id).second) throw ConfigError(where + "duplicate question_id '" + r.question_id + "'");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<BenchmarkRecord> load_dataset(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path.string());
  return parse_dataset(in);
}

// ---------------------------------------------------------------------------
// Outcomes and reports

const char* to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::Correct: return "correct";
    case Outcome::GenerationFailure: return "generation_failure";
    case Outcome::ModuleFailure: return "module_failure";
    case Outcome::PostprocessMismatch: return "postprocess_mismatch";
    case Outcome::WrongAnswer: return "wrong_answer";
  }
  return "?";
}

json EvalRecord::to_json() const {
  json j = record.to_json();
  j["prompt_fingerprint"] = prompt_fingerprint;
  j["program"] = program;
  j["raw_output"] = raw_output;
  j["matched"] = matched;
  j["outcome"] = to_string(outcome);
  if (!detail.empty()) j["detail"] = detail;
  j["backend_calls"] = trace ? trace->backend_calls() : 0;
  return j;
}

double EvalReport::accuracy() const noexcept {
  if (total == 0) return 0.0;
  auto it = counts.find(Outcome::Correct);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

json EvalReport::to_json() const {
  json c = json::object();
  for (auto o : kAllOutcomes) {
    auto it = counts.find(o);
    c[to_string(o)] = it == counts.end() ? 0 : it->second;
  }
  json types = json::object();
  for (const auto& [type, s] : by_type) {
    types[type] = {{"total", s.total},
                   {"correct", s.correct},
                   {"accuracy", s.total ? static_cast<double>(s.correct) / static_cast<double>(s.total) : 0.0}};
  }
  return {{"total", total}, {"accuracy", accuracy()}, {"counts", c}, {"by_type", types}};
}

EvalReport summarize_records(const std::vector<EvalRecord>& records) {
  EvalReport r;
  r.total = records.size();
  for (const auto& rec : records) {
    ++r.counts[rec.outcome];
    if (rec.record.type) {
      auto& s = r.by_type[*rec.record.type];
      ++s.total;
      if (rec.outcome == Outcome::Correct) ++s.correct;
    }
  }
  return r;
}

Outcome classify(const std::vector<std::string>& answers, const std::string& raw, const std::string& matched) {
  std::set<std::string> truth;
  for (const auto& a : answers) truth.insert(text::canonical_phrase(a));
  if (truth.count(text::canonical_phrase(matched))) return Outcome::Correct;
  if (truth.count(text::canonical_phrase(raw))) return Outcome::PostprocessMismatch;
  return Outcome::WrongAnswer;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, v] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      throw ConfigError("unknown config key '" + where + "." + key + "'");
    }
  }
}

}  // namespace

EngineConfig parse_engine_config(const json& j, const fs::path& base_dir) {
  EngineConfig c;
  c.base_dir = base_dir;
  try {
    check_keys(j, "config",
               {"mock_worlds", "videos_dir", "remote", "max_concurrency", "cache_path", "detect_threshold",
                "llm_max_tokens", "llm_temperature", "budget", "tracker", "summarizer", "sample_frames",
                "k_examples", "generation", "api", "answer", "workers", "seed", "faults"});
    if (j.contains("mock_worlds")) {
      const auto& w = j["mock_worlds"];
      if (w.is_string()) {
        const auto dir = resolve(base_dir, w.get<std::string>());
        if (!fs::is_directory(dir)) throw ConfigError("mock world directory not found: " + dir.string());
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir)) {
          if (e.path().extension() == ".json") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        c.mock_worlds = std::move(files);
      } else {
        for (const auto& p : w) c.mock_worlds.push_back(resolve(base_dir, p.get<std::string>()));
      }
    }
    if (j.contains("videos_dir")) c.videos_dir = resolve(base_dir, j["videos_dir"].get<std::string>());
    if (j.contains("remote")) {
      const auto& r = j["remote"];
      check_keys(r, "remote", {"base_url", "token", "token_env", "timeout_s", "overrides"});
      RemoteOptions o;
      o.base_url = r.value("base_url", std::string());
      o.bearer_token = r.value("token", std::string());
      if (r.contains("token_env")) {
        if (const char* t = std::getenv(r["token_env"].get<std::string>().c_str())) o.bearer_token = t;
      }
      o.timeout_s = r.value("timeout_s", o.timeout_s);
      if (r.contains("overrides")) {
        for (const auto& [cap, url] : r["overrides"].items()) {
          o.base_url_overrides[parse_capability(cap)] = url.get<std::string>();
        }
      }
      c.remote = std::move(o);
    }
    c.max_concurrency = j.value("max_concurrency", c.max_concurrency);
    if (c.max_concurrency == 0) throw ConfigError("max_concurrency must be at least 1");
    if (j.contains("cache_path")) c.cache_path = resolve(base_dir, j["cache_path"].get<std::string>());
    c.primitives.detect_threshold = j.value("detect_threshold", c.primitives.detect_threshold);
    c.primitives.llm_max_tokens = j.value("llm_max_tokens", c.primitives.llm_max_tokens);
    c.primitives.llm_temperature = j.value("llm_temperature", c.primitives.llm_temperature);
    if (j.contains("budget")) {
      const auto& b = j["budget"];
      check_keys(b, "budget", {"max_statements", "max_backend_calls", "wall_clock_s"});
      auto& eb = c.interpreter.budget;
      eb.max_statements = b.value("max_statements", eb.max_statements);
      eb.max_backend_calls = b.value("max_backend_calls", eb.max_backend_calls);
      eb.wall_clock_limit_s = b.value("wall_clock_s", eb.wall_clock_limit_s);
      if (eb.max_statements == 0 || eb.max_backend_calls == 0 || eb.wall_clock_limit_s <= 0) {
        throw ConfigError("budgets must be positive");
      }
    }
    if (j.contains("tracker")) {
      const auto& t = j["tracker"];
      check_keys(t, "tracker",
                 {"high_threshold", "low_threshold", "match_gate", "max_age", "min_hits", "min_track_len",
                  "second_stage"});
      auto& tp = c.interpreter.tracker;
      tp.high_threshold = t.value("high_threshold", tp.high_threshold);
      tp.low_threshold = t.value("low_threshold", tp.low_threshold);
      tp.match_gate = t.value("match_gate", tp.match_gate);
      tp.max_age = t.value("max_age", tp.max_age);
      tp.min_hits = t.value("min_hits", tp.min_hits);
      tp.min_track_len = t.value("min_track_len", tp.min_track_len);
      tp.second_stage = t.value("second_stage", tp.second_stage);
    }
    if (j.contains("summarizer")) {
      const auto& s = j["summarizer"];
      check_keys(s, "summarizer", {"chunk_s", "max_prompt_chars", "max_tokens"});
      auto& sc = c.interpreter.summarizer;
      if (s.contains("chunk_s")) {
        sc.chunk_s = Rational::parse(s["chunk_s"].is_string() ? s["chunk_s"].get<std::string>() : s["chunk_s"].dump());
      }
      sc.max_prompt_chars = s.value("max_prompt_chars", sc.max_prompt_chars);
      sc.max_tokens = s.value("max_tokens", sc.max_tokens);
    }
    c.sample_frames = j.value("sample_frames", c.sample_frames);
    if (c.sample_frames < 1) throw ConfigError("sample_frames must be at least 1");
    c.k_examples = j.value("k_examples", c.k_examples);
    if (j.contains("generation")) {
      const auto& g = j["generation"];
      check_keys(g, "generation", {"mode", "fixtures", "example_pool", "temperature", "max_tokens"});
      const auto mode = g.value("mode", std::string("fixture"));
      if (mode != "fixture" && mode != "live") throw ConfigError("generation.mode must be 'fixture' or 'live'");
      c.live = mode == "live";
      if (g.contains("fixtures")) c.fixtures = resolve(base_dir, g["fixtures"].get<std::string>());
      if (g.contains("example_pool")) c.example_pool = resolve(base_dir, g["example_pool"].get<std::string>());
      c.generation.temperature = g.value("temperature", c.generation.temperature);
      c.generation.max_tokens = g.value("max_tokens", c.generation.max_tokens);
    }
    if (j.contains("api")) {
      const auto& a = j["api"];
      check_keys(a, "api", {"include", "exclude"});
      if (a.contains("include")) c.api_include = a["include"].get<std::set<std::string>>();
      if (a.contains("exclude")) c.api_exclude = a["exclude"].get<std::set<std::string>>();
    }
    if (j.contains("answer")) {
      const auto& a = j["answer"];
      check_keys(a, "answer", {"embeddings", "vocab", "mode"});
      if (a.contains("embeddings")) c.embeddings = resolve(base_dir, a["embeddings"].get<std::string>());
      if (a.contains("vocab")) c.vocab = resolve(base_dir, a["vocab"].get<std::string>());
      if (a.contains("mode")) c.vocab_mode = parse_vocab_mode(a["mode"].get<std::string>());
    }
    c.workers = j.value("workers", c.workers);
    if (c.workers == 0) throw ConfigError("workers must be at least 1");
    c.seed = j.value("seed", c.seed);
    if (j.contains("faults")) {
      for (const auto& f : j["faults"]) {
        check_keys(f, "faults[]", {"capability", "corruption", "rate", "frames", "seed"});
        FaultSpec s;
        s.capability = parse_capability(f.at("capability").get<std::string>());
        s.corruption = parse_corruption(f.at("corruption").get<std::string>());
        s.rate = f.value("rate", 0.0);
        if (f.contains("frames")) s.frames = f["frames"].get<std::set<std::int64_t>>();
        s.seed = f.value("seed", c.seed);
        c.faults.push_back(std::move(s));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

EngineConfig load_engine_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_engine_config(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

// ---------------------------------------------------------------------------
// Engine

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  std::vector<MockWorld> worlds;
  for (const auto& p : config_.mock_worlds) {
    try {
      worlds.push_back(load_mock_world(p));
    } catch (const SchemaError& e) {
      throw ConfigError(p.string() + ": " + e.what());
    }
  }
  init(std::move(worlds));
}

Engine::Engine(EngineConfig config, std::vector<MockWorld> worlds) : config_(std::move(config)) {
  init(std::move(worlds));
}

void Engine::init(std::vector<MockWorld> worlds) {
  gateway_ = std::make_unique<Gateway>(GatewayOptions{config_.max_concurrency});
  if (!worlds.empty()) {
    mock_ = std::make_shared<MockBackend>();
    for (auto& w : worlds) {
      for (const auto& f : config_.faults) w = inject_fault(w, f);
      videos_[w.video_id] = w.source();
      mock_->add_world(std::make_shared<const MockWorld>(std::move(w)));
    }
    gateway_->add_backend(mock_);
  }
  if (config_.remote) gateway_->add_backend(std::make_shared<RemoteBackend>(*config_.remote));
  if (config_.cache_path) gateway_->set_cache(std::make_shared<ResponseCache>(*config_.cache_path));
  primitives_ = std::make_unique<Primitives>(*gateway_, config_.primitives);

  api_ = ApiDoc::standard();
  for (const auto& n : config_.api_include) api_.set_included(n, true);
  for (const auto& n : config_.api_exclude) api_.set_included(n, false);
  if (config_.example_pool) pool_ = ExamplePool::load(*config_.example_pool);
  if (config_.embeddings) table_ = EmbeddingTable::load(*config_.embeddings);
  if (config_.vocab) matcher_.emplace(Vocabulary::load(*config_.vocab), table_);
  if (config_.fixtures) fixtures_.emplace(*config_.fixtures);
}

std::shared_ptr<const SourceVideo> Engine::video(const std::string& video_id) const {
  if (auto it = videos_.find(video_id); it != videos_.end()) return it->second;
  if (config_.videos_dir) {
    const auto dir = *config_.videos_dir / video_id;
    if (!fs::is_directory(dir)) throw ConfigError("frame directory not found: " + dir.string());
    return load_frame_directory(dir);
  }
  throw ConfigError("unknown video '" + video_id + "'");
}

PromptBundle Engine::prompt_for(const std::string& question, const std::vector<std::string>& options,
                                lang::TaskKind task) const {
  const auto examples = select_examples(question, pool_, config_.k_examples, table_);
  return build_prompt(api_, examples, question, options, task);
}

GeneratedProgram Engine::generate(const PromptBundle& bundle, const std::string& question_id) const {
  if (config_.live) return generate_live(bundle, *gateway_, config_.generation);
  if (!fixtures_) throw ConfigError("fixture mode needs a fixture directory");
  return generate_from_fixture(bundle, *fixtures_, question_id);
}

std::pair<std::string, std::string> Engine::postprocess(const Value& value, const BenchmarkRecord& record) const {
  std::string raw;
  if (value.is<std::string>()) {
    raw = value.as<std::string>();
  } else if (value.is<bool>()) {
    raw = value.as<bool>() ? "yes" : "no";
  } else if (value.is<CounterMap>()) {
    raw = get_max_key(value.as<CounterMap>());
  } else {
    raw = value.to_text();
  }

  if (record.multiple_choice()) {
    if (value.is<OptionChoice>()) {
      const int i = value.as<OptionChoice>().index;
      if (i < 1 || i > static_cast<int>(record.options.size())) {
        throw ModuleError(ModuleErrorKind::InvalidArgument, "choose_option",
                          "option " + std::to_string(i) + " outside 1.." + std::to_string(record.options.size()));
      }
      return {raw, record.options[static_cast<std::size_t>(i - 1)]};
    }
    for (const auto& o : record.options) {
      if (text::canonical_phrase(o) == text::canonical_phrase(raw)) return {raw, o};
    }
    Vocabulary opts;
    opts.answers = record.options;
    return {raw, match(raw, opts, std::nullopt, VocabMode::None, table_).answer};
  }
  if (matcher_) return {raw, matcher_->match(raw, record.type, config_.vocab_mode).answer};
  return {raw, text::normalize_answer(raw)};
}

EvalRecord Engine::run_record(const BenchmarkRecord& record) const {
  EvalRecord out;
  out.record = record;
  const auto source = video(record.video_id);
  const auto task = record.multiple_choice() ? lang::TaskKind::MultipleChoice : lang::TaskKind::QA;
  const auto bundle = prompt_for(record.question, record.options, task);
  out.prompt_fingerprint = bundle.fingerprint;

  GeneratedProgram program;
  try {
    program = generate(bundle, record.question_id);
  } catch (const GenerationFailure& e) {
    out.outcome = Outcome::GenerationFailure;
    out.detail = e.what();
    return out;
  }
  out.program = lang::render(program.program);

  const VideoClip clip = sample_uniform(source, config_.sample_frames);
  auto result = execute(program.program, clip, record.options, *primitives_, config_.interpreter);
  out.trace = std::move(result.trace);
  if (!result.ok()) {
    out.outcome = Outcome::ModuleFailure;
    out.detail = out.trace->error;
    return out;
  }
  try {
    std::tie(out.raw_output, out.matched) = postprocess(*result.value, record);
  } catch (const ModuleError& e) {
    out.outcome = Outcome::ModuleFailure;
    out.detail = e.what();
    return out;
  }
  out.outcome = classify(record.answers, out.raw_output, out.matched);
  return out;
}

EvalRun Engine::evaluate(const std::vector<BenchmarkRecord>& dataset) const {
  EvalRun run;
  run.records.resize(dataset.size());
  std::vector<std::exception_ptr> errors(dataset.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < dataset.size(); i = next++) {
      try {
        run.records[i] = run_record(dataset[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min(config_.workers, std::max<std::size_t>(dataset.size(), 1));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  run.report = summarize_records(run.records);
  return run;
}

namespace {

std::string safe_name(const std::string& id) {
  std::string out = id;
  for (auto& ch : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.';
    if (!ok) ch = '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

}  // namespace

void write_eval_outputs(const EvalRun& run, const fs::path& out_dir, bool include_timings) {
  fs::create_directories(out_dir / "records");
  write_file(out_dir / "report.json", run.report.to_json().dump(2) + "\n");
  std::ostringstream records, audit;
  for (const auto& r : run.records) {
    records << r.to_json().dump() << '\n';
    std::string trace;
    if (r.trace) {
      trace = r.trace->to_jsonl(include_timings);
    } else {
      trace = json{{"outcome", to_string(r.outcome)}, {"error", r.detail}}.dump() + "\n";
    }
    write_file(out_dir / "records" / (safe_name(r.record.question_id) + ".jsonl"), trace);
    if (r.outcome == Outcome::WrongAnswer || r.outcome == Outcome::PostprocessMismatch) {
      audit << json{{"question_id", r.record.question_id},
                    {"question", r.record.question},
                    {"answers", r.record.answers},
                    {"raw_output", r.raw_output},
                    {"matched", r.matched},
                    {"outcome", to_string(r.outcome)},
                    {"program", r.program}}
                   .dump()
            << '\n';
    }
  }
  write_file(out_dir / "records.jsonl", records.str());
  write_file(out_dir / "audit.jsonl", audit.str());
}

// ---------------------------------------------------------------------------
// Editing

EditMode parse_edit_mode(const std::string& name) {
  const auto n = text::lower(name);
  if (n == "remove_matching" || n == "remove") return EditMode::RemoveMatching;
  if (n == "keep_matching" || n == "keep") return EditMode::KeepMatching;
  throw ConfigError("unknown edit mode '" + name + "'");
}

std::vector<Segment> kept_segments(const std::vector<bool>& keep) {
  std::vector<Segment> out;
  const auto n = static_cast<std::int64_t>(keep.size());
  for (std::int64_t i = 0; i < n;) {
    if (!keep[static_cast<std::size_t>(i)]) {
      ++i;
      continue;
    }
    std::int64_t j = i;
    while (j < n && keep[static_cast<std::size_t>(j)]) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

json EditResult::to_json(const SourceVideo& video) const {
  json segs = json::array();
  for (const auto& s : segments) {
    segs.push_back({{"start_frame", s.start_frame},
                    {"end_frame", s.end_frame},
                    {"start_s", (Rational(s.start_frame) / video.fps).to_double()},
                    {"end_s", (Rational(s.end_frame) / video.fps).to_double()}});
  }
  json manifest = json::array();
  for (const auto& f : kept_frames) {
    if (!f.path.empty()) {
      manifest.push_back(f.path);
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%06lld", static_cast<long long>(f.index));
      manifest.push_back(f.video_id + "/" + buf);
    }
  }
  return {{"video_id", video.video_id}, {"fps", video.fps.str()}, {"segments", segs}, {"manifest", manifest}};
}

EditResult edit_video(const Primitives& primitives, const std::shared_ptr<const SourceVideo>& video,
                      const std::string& predicate, EditMode mode, CallLog* log) {
  if (text::trim(predicate).empty()) throw InvalidArgument("edit predicate must be non-empty");
  const VideoClip all(video);
  const auto matching = primitives.filter_property(all, predicate, log).indices();
  std::vector<bool> keep(static_cast<std::size_t>(video->frame_count), mode == EditMode::RemoveMatching);
  for (auto i : matching) keep[static_cast<std::size_t>(i)] = mode == EditMode::KeepMatching;
  EditResult r;
  r.segments = kept_segments(keep);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i]) r.kept_frames.push_back(video->frame(static_cast<std::int64_t>(i)));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Tracking

json TrackRun::summary() const {
  json out = json::array();
  for (const auto& t : tracks) {
    out.push_back({{"track_id", t.track_id},
                   {"first_frame", t.points.front().frame},
                   {"last_frame", t.points.back().frame},
                   {"length", t.points.size()}});
  }
  return out;
}

TrackRun track_video(const Primitives& primitives, const std::shared_ptr<const SourceVideo>& video,
                     const std::string& query, const TrackerParams& params, CallLog* log) {
  const VideoClip all(video);
  const auto boxes = primitives.detect(all, query, params.low_threshold, log);
  std::vector<std::vector<Detection>> frames;
  TrackRun run;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    std::vector<Detection> dets;
    for (const auto& b : boxes[i]) dets.push_back({all.frames()[i].index, b.box, b.score});
    run.detections += dets.size();
    frames.push_back(std::move(dets));
  }
  run.tracks = track_objects(frames, params);
  return run;
}

}  // namespace proviq
