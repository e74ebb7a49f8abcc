#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "proviq/ast.hpp"
#include "proviq/clip.hpp"
#include "proviq/gateway.hpp"
#include "proviq/primitives.hpp"
#include "proviq/summarizer.hpp"
#include "proviq/tracker.hpp"

namespace proviq {

struct Value;
using ValueList = std::vector<Value>;
using ValueMap = std::vector<std::pair<std::string, Value>>;  // insertion order, unique keys

/// Runtime value of the program language.
struct Value {
  using Data = std::variant<VideoClip, CropClip, std::string, std::int64_t, bool, ValueList, CounterMap,
                            ValueMap, std::vector<Track>, OptionChoice>;
  Data data;

  const char* type_name() const noexcept;
  bool truthy() const;
  /// Plain-text rendering used for choose_option context blocks and CLI output.
  std::string to_text() const;
  nlohmann::json to_json() const;

  template <typename T>
  bool is() const noexcept { return std::holds_alternative<T>(data); }
  template <typename T>
  const T& as() const { return std::get<T>(data); }
};

/// get_max_key: highest count, earliest insertion wins ties. Throws ModuleError(EmptyCounter).
std::string get_max_key(const CounterMap& counts);

struct ExecBudget {
  std::size_t max_statements = 1000;
  std::size_t max_backend_calls = 5000;
  double wall_clock_limit_s = 600;
};

struct TraceEntry {
  std::size_t step = 0;       // execution order
  std::size_t statement = 0;  // pre-order index of the statement in the program
  int line = 0;
  std::string operation;
  std::string args;
  std::chrono::microseconds duration{0};
  std::vector<CallRecord> calls;
};

enum class ExecOutcome { Ok, ModuleFailure, BudgetExceeded, TypeError, RuntimeError };
const char* to_string(ExecOutcome outcome) noexcept;

struct ExecTrace {
  std::vector<TraceEntry> entries;
  ExecOutcome outcome = ExecOutcome::Ok;
  std::string error;        // message when outcome != Ok
  std::string error_kind;   // ModuleErrorKind / BudgetKind name, when applicable
  std::string primitive;    // failing primitive for module failures
  std::optional<std::size_t> failed_statement;

  std::size_t backend_calls() const;
  bool calls_capability(Capability cap) const;
  /// One line per entry, then a final outcome line. Durations and cache hits only when requested.
  std::string to_jsonl(bool include_durations = false) const;
};

struct ExecResult {
  std::optional<Value> value;
  ExecTrace trace;
  bool ok() const noexcept { return trace.outcome == ExecOutcome::Ok; }
};

struct InterpreterConfig {
  ExecBudget budget;
  SummarizerConfig summarizer;
  TrackerParams tracker;
};

/// Runs a validated program. The first parameter is bound to `clip`; a second one, when
/// present, to the option list. Runtime failures end up in the trace, never thrown.
ExecResult execute(const lang::Program& program, const VideoClip& clip, const std::vector<std::string>& options,
                   const Primitives& primitives, const InterpreterConfig& config = {});

}  // namespace proviq
