#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "proviq/ast.hpp"

namespace proviq::lang {

/// Parses one program: a single `def name(params):` with an indented body.
/// Throws SyntaxError carrying a 1-based line/column.
Program parse(std::string_view source);

/// Canonical text; parse(render(p)) == p.
std::string render(const Program& program);
std::string render(const Expr& expr);

enum class TaskKind { QA, MultipleChoice, Edit, Track };

TaskKind parse_task_kind(std::string_view name);
const char* to_string(TaskKind kind) noexcept;

struct Violation {
  Pos pos;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate(const Program& program, TaskKind task);

/// Methods callable on clip values, and their accepted argument counts.
struct MethodSignature {
  std::string_view name;
  int min_args;
  int max_args;
};
const std::vector<MethodSignature>& method_whitelist();
const std::vector<MethodSignature>& builtin_whitelist();
bool is_whitelisted_method(std::string_view name);
bool is_whitelisted_builtin(std::string_view name);

/// Every method and builtin named anywhere in the program.
std::set<std::string> called_operations(const Program& program);

}  // namespace proviq::lang
