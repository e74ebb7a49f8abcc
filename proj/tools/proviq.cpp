// Command-line front end: query, eval, edit, track, summarize, gen-program.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "proviq/errors.hpp"
#include "proviq/harness.hpp"
#include "proviq/lang.hpp"
#include "proviq/summarizer.hpp"
#include "proviq/tracker.hpp"

namespace fs = std::filesystem;
using namespace proviq;

namespace {

enum Exit { kOk = 0, kGenerationFailure = 2, kModuleFailure = 3, kConfigError = 4 };

struct Common {
  std::string config;
  std::vector<std::string> mock_worlds;
  std::string fixtures;
  bool explain = false;
  bool dry_run = false;
  std::optional<std::uint64_t> seed;
  bool timings = false;
};

EngineConfig make_config(const Common& c) {
  EngineConfig cfg = c.config.empty() ? EngineConfig{} : load_engine_config(c.config);
  if (c.config.empty()) cfg.base_dir = fs::current_path();
  for (const auto& w : c.mock_worlds) cfg.mock_worlds.emplace_back(w);
  if (!c.fixtures.empty()) {
    cfg.fixtures = c.fixtures;
    cfg.live = false;
  }
  if (c.seed) {
    cfg.seed = *c.seed;
    for (auto& f : cfg.faults) f.seed = *c.seed;
  }
  return cfg;
}

std::shared_ptr<const SourceVideo> resolve_video(const Engine& engine, const std::string& video) {
  if (fs::is_directory(video)) return load_frame_directory(video);
  return engine.video(video);
}

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

void print_trace(const ExecTrace& trace) {
  for (const auto& e : trace.entries) {
    std::cout << "  [" << e.step << "] line " << e.line << "  " << e.operation << "  " << e.args;
    if (!e.calls.empty()) {
      std::map<std::string, int> per_cap;
      for (const auto& c : e.calls) ++per_cap[to_string(c.capability)];
      std::cout << "  (";
      bool first = true;
      for (const auto& [cap, n] : per_cap) {
        std::cout << (first ? "" : ", ") << cap << " x" << n;
        first = false;
      }
      std::cout << ")";
    }
    std::cout << "\n";
  }
  std::cout << "  outcome: " << to_string(trace.outcome);
  if (trace.outcome != ExecOutcome::Ok) std::cout << " (" << trace.error << ")";
  std::cout << "\n";
}

int cmd_query(const Common& c, const std::string& video, const std::string& question,
              const std::vector<std::string>& options, const std::string& type, const std::string& question_id) {
  Engine engine(make_config(c));
  const auto source = resolve_video(engine, video);
  const auto task = options.empty() ? lang::TaskKind::QA : lang::TaskKind::MultipleChoice;
  const auto bundle = engine.prompt_for(question, options, task);
  GeneratedProgram program;
  try {
    program = engine.generate(bundle, question_id.empty() ? bundle.fingerprint : question_id);
  } catch (const GenerationFailure& e) {
    std::cerr << "generation_failure: " << e.what() << "\n";
    return kGenerationFailure;
  }
  if (c.dry_run) {
    std::cout << bundle.text << "\n# --- generated program ---\n" << lang::render(program.program);
    return kOk;
  }
  if (c.explain) std::cout << "program:\n" << lang::render(program.program) << "\n";

  const VideoClip clip = sample_uniform(source, engine.config().sample_frames);
  auto result = execute(program.program, clip, options, engine.primitives(), engine.config().interpreter);
  if (c.explain) {
    std::cout << "trace:\n";
    print_trace(result.trace);
  }
  if (!result.ok()) {
    std::cerr << "module_failure: " << result.trace.error << "\n";
    return kModuleFailure;
  }
  BenchmarkRecord record;
  record.question = question;
  record.options = options;
  if (!type.empty()) record.type = type;
  const auto [raw, matched] = engine.postprocess(*result.value, record);
  if (c.explain) std::cout << "raw: " << raw << "\n";
  std::cout << matched << "\n";
  return kOk;
}

int cmd_eval(const Common& c, const std::string& dataset, const std::string& out_dir) {
  Engine engine(make_config(c));
  const auto records = load_dataset(dataset);
  if (c.dry_run) {
    for (const auto& r : records) {
      const auto task = r.multiple_choice() ? lang::TaskKind::MultipleChoice : lang::TaskKind::QA;
      const auto bundle = engine.prompt_for(r.question, r.options, task);
      std::cout << "# " << r.question_id << " " << bundle.fingerprint << "\n";
      try {
        std::cout << lang::render(engine.generate(bundle, r.question_id).program) << "\n";
      } catch (const GenerationFailure& e) {
        std::cout << "# generation_failure: " << e.what() << "\n\n";
      }
    }
    return kOk;
  }
  const auto run = engine.evaluate(records);
  write_eval_outputs(run, out_dir, c.timings);
  std::cout << run.report.to_json().dump(2) << "\n";
  return kOk;
}

int cmd_edit(const Common& c, const std::string& video, const std::string& predicate, const std::string& mode,
             const std::string& out) {
  Engine engine(make_config(c));
  const auto source = resolve_video(engine, video);
  const auto edit_mode = parse_edit_mode(mode);
  if (c.dry_run) {
    std::cout << "would evaluate '" << predicate << "' on " << source->frame_count << " frames\n";
    return kOk;
  }
  const auto result = edit_video(engine.primitives(), source, predicate, edit_mode);
  write_or_print(out, result.to_json(*source).dump(2) + "\n");
  return kOk;
}

int cmd_track(const Common& c, const std::string& video, const std::string& query, const std::string& out) {
  Engine engine(make_config(c));
  const auto source = resolve_video(engine, video);
  if (c.dry_run) {
    std::cout << "would detect '" << query << "' on " << source->frame_count << " frames\n";
    return kOk;
  }
  const auto run = track_video(engine.primitives(), source, query, engine.config().interpreter.tracker);
  if (run.detections == 0) std::cerr << "warning: no detections for '" << query << "'\n";
  write_or_print(out, export_tracks_jsonl(run.tracks));
  (out.empty() ? std::cerr : std::cout) << run.summary().dump(2) << "\n";
  return kOk;
}

int cmd_summarize(const Common& c, const std::string& video, const std::string& out) {
  Engine engine(make_config(c));
  const auto source = resolve_video(engine, video);
  const auto& cfg = engine.config().interpreter.summarizer;
  if (c.dry_run) {
    std::cout << chunk(*source, cfg.chunk_s).size() << " chunks\n";
    return kOk;
  }
  const auto summary = get_summary(*source, engine.gateway(), cfg);
  if (c.explain) {
    for (const auto& ch : summary.chunks) {
      if (ch.failed) std::cerr << "chunk " << ch.index << ": " << ch.error << "\n";
    }
  }
  write_or_print(out, export_summary(summary).dump(2) + "\n");
  return kOk;
}

int cmd_gen_program(const Common& c, const std::string& question, const std::vector<std::string>& options,
                    const std::string& task_name, const std::string& question_id) {
  Engine engine(make_config(c));
  lang::TaskKind task = options.empty() ? lang::TaskKind::QA : lang::TaskKind::MultipleChoice;
  if (!task_name.empty()) task = lang::parse_task_kind(task_name);
  const auto bundle = engine.prompt_for(question, options, task);
  if (c.explain || c.dry_run) std::cout << bundle.text << "\n# fingerprint " << bundle.fingerprint << "\n\n";
  try {
    const auto g = engine.generate(bundle, question_id.empty() ? bundle.fingerprint : question_id);
    std::cout << lang::render(g.program);
  } catch (const GenerationFailure& e) {
    std::cerr << "generation_failure: " << e.what() << "\n";
    return kGenerationFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Answer questions about videos by generating and running small programs."};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--config", common.config, "engine configuration (JSON)");
  app.add_option("--mock-world", common.mock_worlds, "mock world file (repeatable)");
  app.add_option("--fixtures", common.fixtures, "directory of stored programs");
  app.add_flag("--explain", common.explain, "print the program and its trace");
  app.add_flag("--dry-run", common.dry_run, "stop before executing anything");
  app.add_option("--seed", common.seed, "seed for fault injection");
  app.add_flag("--timings", common.timings, "include statement durations in trace logs");

  std::string video, question, type, question_id, dataset, out_dir = "eval_out", predicate, mode = "remove_matching",
                                                              out, query, task;
  std::vector<std::string> options;

  auto* q = app.add_subcommand("query", "answer one question about one video");
  q->add_option("--video", video, "video id or frame directory")->required();
  q->add_option("--question", question)->required();
  q->add_option("--option", options, "answer option (repeatable; makes it multiple choice)");
  q->add_option("--type", type, "question type for vocabulary constraints");
  q->add_option("--question-id", question_id, "fixture key");

  auto* e = app.add_subcommand("eval", "evaluate a dataset");
  e->add_option("--dataset", dataset, "JSON-lines dataset")->required();
  e->add_option("--out", out_dir, "output directory");

  auto* ed = app.add_subcommand("edit", "cut a video by a yes/no predicate");
  ed->add_option("--video", video)->required();
  ed->add_option("--predicate", predicate)->required();
  ed->add_option("--mode", mode, "remove_matching or keep_matching");
  ed->add_option("--out", out, "write the segment list here");

  auto* tr = app.add_subcommand("track", "track every instance of an object");
  tr->add_option("--video", video)->required();
  tr->add_option("--query", query, "object to detect")->required();
  tr->add_option("--out", out, "write the JSON-lines track export here");

  auto* su = app.add_subcommand("summarize", "narrate a long video");
  su->add_option("--video", video)->required();
  su->add_option("--out", out);

  auto* gp = app.add_subcommand("gen-program", "build the prompt and produce a program without running it");
  gp->add_option("--question", question)->required();
  gp->add_option("--option", options);
  gp->add_option("--task", task, "qa, multiple_choice, edit or track");
  gp->add_option("--question-id", question_id);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kConfigError;
  }

  try {
    if (q->parsed()) return cmd_query(common, video, question, options, type, question_id);
    if (e->parsed()) return cmd_eval(common, dataset, out_dir);
    if (ed->parsed()) return cmd_edit(common, video, predicate, mode, out);
    if (tr->parsed()) return cmd_track(common, video, query, out);
    if (su->parsed()) return cmd_summarize(common, video, out);
    if (gp->parsed()) return cmd_gen_program(common, question, options, task, question_id);
  } catch (const GenerationFailure& ex) {
    std::cerr << "generation_failure: " << ex.what() << "\n";
    return kGenerationFailure;
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kConfigError;
  } catch (const SchemaError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kConfigError;
  } catch (const ModuleError& ex) {
    std::cerr << "module_failure: " << ex.what() << "\n";
    return kModuleFailure;
  } catch (const InvalidArgument& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kConfigError;
  } catch (const Error& ex) {
    std::cerr << "module_failure: " << ex.what() << "\n";
    return kModuleFailure;
  }
  return kOk;
}
