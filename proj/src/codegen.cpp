#include "proviq/codegen.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "proviq/errors.hpp"
#include "proviq/text.hpp"

namespace proviq {

ApiDoc ApiDoc::standard() {
  ApiDoc d;
  d.entries_ = {
      {"get_max_key",
       "def get_max_key(counts: Dict[str, int]) -> str\n"
       "    # The answer that occurs most often. Ties go to the answer seen first.\n",
       true},
      {"len",
       "def len(value) -> int\n"
       "    # Number of frames of a clip, or number of items of a list, map or string.\n",
       true},
      {"num_frames",
       "VideoClip.num_frames: int\n"
       "    # Frame count of the clip.\n",
       true},
      {"trim",
       "def trim(self, start: int, end: int) -> VideoClip\n"
       "    # Frames at positions start..end-1 of this clip.\n",
       true},
      {"filter_property",
       "def filter_property(self, property: str) -> VideoClip\n"
       "    # Asks a yes/no question on every frame and keeps the frames answered yes.\n"
       "    # Example:\n"
       "    #   dancing = video.filter_property(\"Is someone dancing?\")\n",
       true},
      {"filter_object",
       "def filter_object(self, object: str) -> VideoClip\n"
       "    # Keeps the frames in which the detector finds the object.\n"
       "    # Example:\n"
       "    #   dogs = video.filter_object(\"dog\")\n",
       true},
      {"find",
       "def find(self, object: str) -> VideoClip\n"
       "    # Every detected region of the object, one crop per detection, in frame order.\n"
       "    # Later calls on the result look only inside the crops.\n",
       true},
      {"video_query",
       "def video_query(self, query: str, possible_answers: List[str] = None) -> Dict[str, int]\n"
       "    # Asks the question on each frame and counts the answers.\n"
       "    # Example:\n"
       "    #   votes = clip.video_query(\"What is the man holding?\")\n"
       "    #   return get_max_key(votes)\n",
       true},
      {"get_caption",
       "def get_caption(self, index: int) -> str\n"
       "    # A caption of the frame at position index, 0 <= index < num_frames.\n",
       true},
      {"get_script",
       "def get_script(self) -> str\n"
       "    # Transcript of the speech in the whole video.\n",
       true},
      {"get_summary",
       "def get_summary(self) -> str\n"
       "    # A paragraph describing what happens over the whole video.\n",
       false},
      {"track_objects",
       "def track_objects(self, boxes) -> List[Track]\n"
       "    # Links detections over time into tracks. boxes is the result of find(),\n"
       "    # or an object name to detect in this clip.\n",
       true},
      {"choose_option",
       "def choose_option(self, question: str, context: Dict[str, str], options: List[str]) -> str\n"
       "    # Lets a language model pick the option best supported by the context.\n"
       "    # Example:\n"
       "    #   context = {\"speech\": video.get_script()}\n"
       "    #   return video.choose_option(\"Why is she upset?\", context, possible_answers)\n",
       true},
  };
  return d;
}

void ApiDoc::set_included(const std::string& name, bool included) {
  for (auto& e : entries_) {
    if (e.name == name) {
      e.included = included;
      return;
    }
  }
  throw ConfigError("unknown API entry '" + name + "'");
}

bool ApiDoc::included(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.included;
  }
  return false;
}

std::set<std::string> ApiDoc::included_names() const {
  std::set<std::string> out;
  for (const auto& e : entries_) {
    if (e.included) out.insert(e.name);
  }
  return out;
}

std::string ApiDoc::render() const {
  std::ostringstream os;
  os << "# Answer questions about a video by writing one short Python function that uses\n"
        "# only the operations below. The argument `video` is a VideoClip.\n\n";
  for (const auto& e : entries_) {
    if (e.included) os << e.doc << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

std::optional<std::string> check_program(const std::string& source, lang::TaskKind task, lang::Program* out) {
  lang::Program p;
  try {
    p = lang::parse(source);
  } catch (const SyntaxError& e) {
    return std::string(e.what());
  }
  const auto report = lang::validate(p, task);
  if (!report.ok()) return text::trim(report.summary());
  if (out) *out = std::move(p);
  return std::nullopt;
}

ExamplePool::ExamplePool(std::vector<PoolExample> examples) : examples_(std::move(examples)) {
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const auto& ex = examples_[i];
    if (text::lower(ex.split) == "test") {
      throw ConfigError("example " + std::to_string(i) + " comes from a test split");
    }
    if (auto diag = check_program(ex.program, ex.task, nullptr)) {
      throw ConfigError("example " + std::to_string(i) + " is not a valid program: " + *diag);
    }
  }
}

ExamplePool ExamplePool::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("example pool must be a JSON list");
  std::vector<PoolExample> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      PoolExample ex;
      ex.question = j[i].at("question").get<std::string>();
      ex.program = j[i].at("program").get<std::string>();
      ex.task = lang::parse_task_kind(j[i].value("task", std::string("qa")));
      ex.split = j[i].value("split", std::string("train"));
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("example " + std::to_string(i) + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw ConfigError("example " + std::to_string(i) + ": " + e.what());
    }
  }
  return ExamplePool(std::move(out));
}

ExamplePool ExamplePool::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open example pool " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("example pool " + path.string() + ": " + e.what());
  }
}

std::vector<PoolExample> select_examples(const std::string& question, const ExamplePool& pool, std::size_t k,
                                         const EmbeddingTable& table) {
  const auto& ex = pool.examples();
  const Eigen::VectorXd q = embed_phrase(question, table);
  std::vector<double> sim(ex.size());
  for (std::size_t i = 0; i < ex.size(); ++i) sim[i] = cosine(q, embed_phrase(ex[i].question, table));
  std::vector<std::size_t> order(ex.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sim[a] > sim[b]; });
  order.resize(std::min(k, order.size()));
  std::vector<PoolExample> out;
  for (auto i : order) out.push_back(ex[i]);
  return out;
}

namespace {

std::string entry_instruction(lang::TaskKind task) {
  switch (task) {
    case lang::TaskKind::QA:
    case lang::TaskKind::MultipleChoice: return "# Write answer_question(video, possible_answers).";
    case lang::TaskKind::Edit:
    case lang::TaskKind::Track: return "# Write run(video).";
  }
  return "";
}

}  // namespace

PromptBundle build_prompt(const ApiDoc& api, const std::vector<PoolExample>& examples, const std::string& question,
                          const std::vector<std::string>& options, lang::TaskKind task) {
  PromptBundle b;
  b.api_text = api.render();
  b.examples = examples;
  b.question = question;
  b.options = options;
  b.task = task;

  std::ostringstream os;
  os << b.api_text;
  if (!examples.empty()) os << "# Examples\n\n";
  for (const auto& ex : examples) {
    os << "question: " << ex.question << "\n" << text::trim(ex.program) << "\n\n";
  }
  os << "# Your turn\n\n";
  os << "question: " << question << "\n";
  if (!options.empty()) {
    os << "possible answers:\n";
    for (std::size_t i = 0; i < options.size(); ++i) os << (i + 1) << ". " << options[i] << "\n";
  }
  os << entry_instruction(task) << "\n";
  b.text = os.str();
  b.fingerprint = text::sha256_hex(b.text);
  return b;
}

FixtureStore::FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) throw ConfigError("fixture directory not found: " + dir_.string());
}

std::optional<std::string> FixtureStore::lookup(const std::string& key) const {
  if (key.empty() || key.find('/') != std::string::npos || key.find("..") != std::string::npos) return std::nullopt;
  const auto path = dir_ / (key + ".py");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string strip_code_fences(const std::string& text) {
  const auto open = text.find("```");
  if (open == std::string::npos) return text;
  auto body = text.find('\n', open);
  if (body == std::string::npos) return std::string();
  ++body;
  const auto close = text.find("```", body);
  return text.substr(body, close == std::string::npos ? std::string::npos : close - body);
}

GeneratedProgram generate_from_fixture(const PromptBundle& bundle, const FixtureStore& store,
                                       const std::string& question_id) {
  auto source = store.lookup(question_id);
  if (!source) source = store.lookup(bundle.fingerprint);
  if (!source) {
    throw GenerationFailure("no fixture program for '" + question_id + "' in " + store.dir().string());
  }
  GeneratedProgram g;
  g.source = strip_code_fences(*source);
  if (auto diag = check_program(g.source, bundle.task, &g.program)) {
    throw GenerationFailure("fixture program for '" + question_id + "' rejected: " + *diag);
  }
  return g;
}

GeneratedProgram generate_live(const PromptBundle& bundle, Gateway& gateway, const LiveGenerationOptions& options,
                               CallLog* log) {
  GeneratedProgram g;
  std::string prompt = bundle.text;
  for (int attempt = 1; attempt <= 2; ++attempt) {
    CapabilityRequest r;
    r.capability = Capability::LLMComplete;
    r.text = prompt;
    r.max_tokens = options.max_tokens;
    r.temperature = options.temperature;
    std::string response;
    try {
      response = gateway.call(r, log).text;
    } catch (const BudgetExceeded&) {
      throw;
    } catch (const Error& e) {
      throw GenerationFailure(std::string("program generation call failed: ") + e.what());
    }
    g.attempts = attempt;
    g.source = strip_code_fences(response);
    const auto diag = check_program(g.source, bundle.task, &g.program);
    if (!diag) return g;
    g.diagnostics.push_back(*diag);
    prompt = bundle.text + response + "\n# The program above was rejected: " + *diag +
             "\n# Write a corrected program.\n" + entry_instruction(bundle.task) + "\n";
  }
  throw GenerationFailure("no valid program after 2 attempts: " + text::join(g.diagnostics, " | "));
}

}  // namespace proviq
