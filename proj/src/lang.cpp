#include "proviq/lang.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

#include "proviq/errors.hpp"

namespace proviq::lang {

const char* to_string(ArithOp op) noexcept {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::FloorDiv: return "//";
  }
  return "?";
}

const char* to_string(CompareOp op) noexcept {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

const char* to_string(LogicalOp op) noexcept { return op == LogicalOp::And ? "and" : "or"; }

TaskKind parse_task_kind(std::string_view name) {
  if (name == "qa") return TaskKind::QA;
  if (name == "multiple_choice" || name == "mc") return TaskKind::MultipleChoice;
  if (name == "edit") return TaskKind::Edit;
  if (name == "track") return TaskKind::Track;
  throw InvalidArgument("unknown task kind: " + std::string(name));
}

const char* to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::QA: return "qa";
    case TaskKind::MultipleChoice: return "multiple_choice";
    case TaskKind::Edit: return "edit";
    case TaskKind::Track: return "track";
  }
  return "?";
}

const std::vector<MethodSignature>& method_whitelist() {
  static const std::vector<MethodSignature> kMethods = {
      {"filter_property", 1, 1}, {"filter_object", 1, 1}, {"find", 1, 1},
      {"video_query", 1, 2},     {"get_caption", 1, 1},   {"get_script", 0, 0},
      {"get_summary", 0, 0},     {"track_objects", 0, 1}, {"choose_option", 3, 3},
      {"trim", 2, 2},
  };
  return kMethods;
}

const std::vector<MethodSignature>& builtin_whitelist() {
  static const std::vector<MethodSignature> kBuiltins = {{"get_max_key", 1, 1}, {"len", 1, 1}};
  return kBuiltins;
}

namespace {

const MethodSignature* lookup(const std::vector<MethodSignature>& table, std::string_view name) {
  for (const auto& sig : table) {
    if (sig.name == name) return &sig;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Rendering

int precedence(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Logical>) return n.op == LogicalOp::Or ? 1 : 2;
        if constexpr (std::is_same_v<T, Not>) return 3;
        if constexpr (std::is_same_v<T, Compare>) return 4;
        if constexpr (std::is_same_v<T, Arith>) {
          return (n.op == ArithOp::Add || n.op == ArithOp::Sub) ? 5 : 6;
        }
        if constexpr (std::is_same_v<T, Literal>) {
          const auto* i = std::get_if<std::int64_t>(&n.value);
          return (i && *i < 0) ? 7 : 8;
        }
        return 8;
      },
      e.node);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

void render_expr(std::ostream& os, const Expr& e);

void render_child(std::ostream& os, const Expr& e, int min_prec) {
  if (precedence(e) < min_prec) {
    os << '(';
    render_expr(os, e);
    os << ')';
  } else {
    render_expr(os, e);
  }
}

void render_args(std::ostream& os, const std::vector<Expr>& args) {
  os << '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) os << ", ";
    render_expr(os, args[i]);
  }
  os << ')';
}

void render_expr(std::ostream& os, const Expr& e) {
  const int prec = precedence(e);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Literal>) {
          if (const auto* s = std::get_if<std::string>(&n.value)) os << quote(*s);
          if (const auto* i = std::get_if<std::int64_t>(&n.value)) os << *i;
          if (const auto* b = std::get_if<bool>(&n.value)) os << (*b ? "True" : "False");
        } else if constexpr (std::is_same_v<T, Name>) {
          os << n.id;
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          render_child(os, *n.receiver, 8);
          os << '.' << n.method;
          render_args(os, n.args);
        } else if constexpr (std::is_same_v<T, BuiltinCall>) {
          os << n.name;
          render_args(os, n.args);
        } else if constexpr (std::is_same_v<T, Attribute>) {
          render_child(os, *n.receiver, 8);
          os << '.' << n.name;
        } else if constexpr (std::is_same_v<T, Arith> || std::is_same_v<T, Logical>) {
          render_child(os, *n.lhs, prec);
          os << ' ' << to_string(n.op) << ' ';
          render_child(os, *n.rhs, prec + 1);
        } else if constexpr (std::is_same_v<T, Compare>) {
          render_child(os, *n.lhs, 5);
          os << ' ' << to_string(n.op) << ' ';
          render_child(os, *n.rhs, 5);
        } else if constexpr (std::is_same_v<T, Not>) {
          os << "not ";
          render_child(os, *n.operand, 3);
        } else if constexpr (std::is_same_v<T, ListLiteral>) {
          os << '[';
          for (std::size_t i = 0; i < n.items.size(); ++i) {
            if (i) os << ", ";
            render_expr(os, n.items[i]);
          }
          os << ']';
        } else if constexpr (std::is_same_v<T, MapLiteral>) {
          os << '{';
          for (std::size_t i = 0; i < n.pairs.size(); ++i) {
            if (i) os << ", ";
            render_expr(os, n.pairs[i].first);
            os << ": ";
            render_expr(os, n.pairs[i].second);
          }
          os << '}';
        } else if constexpr (std::is_same_v<T, IndexAccess>) {
          render_child(os, *n.receiver, 8);
          os << '[';
          render_expr(os, *n.key);
          os << ']';
        }
      },
      e.node);
}

void render_block(std::ostream& os, const std::vector<Stmt>& body, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 4, ' ');
  for (const auto& stmt : body) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            os << indent << n.target << " = ";
            render_expr(os, n.value);
            os << '\n';
          } else if constexpr (std::is_same_v<T, Return>) {
            os << indent << "return ";
            render_expr(os, n.value);
            os << '\n';
          } else {
            os << indent << "if ";
            render_expr(os, n.cond);
            os << ":\n";
            render_block(os, n.then_body, depth + 1);
            if (!n.else_body.empty()) {
              os << indent << "else:\n";
              render_block(os, n.else_body, depth + 1);
            }
          }
        },
        stmt.node);
  }
}

// ---------------------------------------------------------------------------
// Validation

class Validator {
 public:
  explicit Validator(ValidationReport& report) : report_(report) {}

  void check_expr(const Expr& e, const std::set<std::string>& defined) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Name>) {
            if (!defined.count(n.id)) add(e.pos, "use before assignment: '" + n.id + "'");
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            check_expr(*n.receiver, defined);
            if (const auto* sig = lookup(method_whitelist(), n.method)) {
              check_arity(e.pos, *sig, n.args.size());
            } else {
              add(e.pos, "unknown method: " + n.method);
            }
            for (const auto& a : n.args) check_expr(a, defined);
          } else if constexpr (std::is_same_v<T, BuiltinCall>) {
            if (const auto* sig = lookup(builtin_whitelist(), n.name)) {
              check_arity(e.pos, *sig, n.args.size());
            } else {
              add(e.pos, "unknown function: " + n.name);
            }
            for (const auto& a : n.args) check_expr(a, defined);
          } else if constexpr (std::is_same_v<T, Attribute>) {
            check_expr(*n.receiver, defined);
            if (n.name != "num_frames") add(e.pos, "unknown attribute: " + n.name);
          } else if constexpr (std::is_same_v<T, Arith> || std::is_same_v<T, Compare> ||
                               std::is_same_v<T, Logical>) {
            check_expr(*n.lhs, defined);
            check_expr(*n.rhs, defined);
          } else if constexpr (std::is_same_v<T, Not>) {
            check_expr(*n.operand, defined);
          } else if constexpr (std::is_same_v<T, ListLiteral>) {
            for (const auto& item : n.items) check_expr(item, defined);
          } else if constexpr (std::is_same_v<T, MapLiteral>) {
            for (const auto& [k, v] : n.pairs) {
              check_expr(k, defined);
              check_expr(v, defined);
            }
          } else if constexpr (std::is_same_v<T, IndexAccess>) {
            check_expr(*n.receiver, defined);
            check_expr(*n.key, defined);
          }
        },
        e.node);
  }

  /// Walks a block, updating `defined`. Returns true if every path through it returns.
  bool check_block(const std::vector<Stmt>& body, std::set<std::string>& defined) {
    bool returns = false;
    for (const auto& stmt : body) {
      // Unreachable statements are still checked.
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Assign>) {
              check_expr(n.value, defined);
              if (lookup(builtin_whitelist(), n.target)) {
                add(stmt.pos, "cannot assign to builtin '" + n.target + "'");
              }
              defined.insert(n.target);
            } else if constexpr (std::is_same_v<T, Return>) {
              check_expr(n.value, defined);
              returns = true;
            } else {
              check_expr(n.cond, defined);
              auto then_defined = defined;
              auto else_defined = defined;
              const bool then_returns = check_block(n.then_body, then_defined);
              const bool else_returns = check_block(n.else_body, else_defined);
              if (then_returns && else_returns) {
                returns = true;
              } else if (then_returns) {
                defined = std::move(else_defined);
              } else if (else_returns) {
                defined = std::move(then_defined);
              } else {
                std::set<std::string> both;
                std::set_intersection(then_defined.begin(), then_defined.end(),
                                      else_defined.begin(), else_defined.end(),
                                      std::inserter(both, both.begin()));
                defined = std::move(both);
              }
            }
          },
          stmt.node);
    }
    return returns;
  }

  void add(Pos pos, std::string message) { report_.violations.push_back({pos, std::move(message)}); }

 private:
  void check_arity(Pos pos, const MethodSignature& sig, std::size_t got) {
    const auto n = static_cast<int>(got);
    if (n < sig.min_args || n > sig.max_args) {
      std::string expected = std::to_string(sig.min_args);
      if (sig.max_args != sig.min_args) expected += "-" + std::to_string(sig.max_args);
      add(pos, "wrong argument count for " + std::string(sig.name) + ": expected " + expected +
                   ", got " + std::to_string(n));
    }
  }

  ValidationReport& report_;
};

void collect_ops(const Expr& e, std::set<std::string>& out);

void collect_ops_block(const std::vector<Stmt>& body, std::set<std::string>& out) {
  for (const auto& stmt : body) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, If>) {
            collect_ops(n.cond, out);
            collect_ops_block(n.then_body, out);
            collect_ops_block(n.else_body, out);
          } else {
            collect_ops(n.value, out);
          }
        },
        stmt.node);
  }
}

void collect_ops(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, MethodCall>) {
          out.insert(n.method);
          collect_ops(*n.receiver, out);
          for (const auto& a : n.args) collect_ops(a, out);
        } else if constexpr (std::is_same_v<T, BuiltinCall>) {
          out.insert(n.name);
          for (const auto& a : n.args) collect_ops(a, out);
        } else if constexpr (std::is_same_v<T, Attribute>) {
          collect_ops(*n.receiver, out);
        } else if constexpr (std::is_same_v<T, Arith> || std::is_same_v<T, Compare> ||
                             std::is_same_v<T, Logical>) {
          collect_ops(*n.lhs, out);
          collect_ops(*n.rhs, out);
        } else if constexpr (std::is_same_v<T, Not>) {
          collect_ops(*n.operand, out);
        } else if constexpr (std::is_same_v<T, ListLiteral>) {
          for (const auto& item : n.items) collect_ops(item, out);
        } else if constexpr (std::is_same_v<T, MapLiteral>) {
          for (const auto& [k, v] : n.pairs) {
            collect_ops(k, out);
            collect_ops(v, out);
          }
        } else if constexpr (std::is_same_v<T, IndexAccess>) {
          collect_ops(*n.receiver, out);
          collect_ops(*n.key, out);
        }
      },
      e.node);
}

}  // namespace

bool is_whitelisted_method(std::string_view name) { return lookup(method_whitelist(), name); }
bool is_whitelisted_builtin(std::string_view name) { return lookup(builtin_whitelist(), name); }

std::string render(const Expr& expr) {
  std::ostringstream os;
  render_expr(os, expr);
  return os.str();
}

std::string render(const Program& program) {
  std::ostringstream os;
  os << "def " << program.entry_name << '(';
  for (std::size_t i = 0; i < program.params.size(); ++i) {
    if (i) os << ", ";
    os << program.params[i];
  }
  os << "):\n";
  render_block(os, program.body, 1);
  return os.str();
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << v.pos.line << ':' << v.pos.col << ": " << v.message << '\n';
  }
  return os.str();
}

ValidationReport validate(const Program& program, TaskKind task) {
  ValidationReport report;
  Validator v(report);
  const bool qa_like = task == TaskKind::QA || task == TaskKind::MultipleChoice;
  const std::string expected_name = qa_like ? "answer_question" : "run";
  const std::vector<std::string> expected_params =
      qa_like ? std::vector<std::string>{"video", "possible_answers"}
              : std::vector<std::string>{"video"};
  if (program.entry_name != expected_name || program.params != expected_params) {
    std::string sig = expected_name + "(";
    for (std::size_t i = 0; i < expected_params.size(); ++i) {
      sig += (i ? ", " : "") + expected_params[i];
    }
    v.add(program.pos, "wrong entry signature for task " + std::string(to_string(task)) +
                           ": expected " + sig + ")");
  }
  std::set<std::string> defined(program.params.begin(), program.params.end());
  if (!v.check_block(program.body, defined)) {
    Pos at = program.body.empty() ? program.pos : program.body.back().pos;
    v.add(at, "missing return path");
  }
  return report;
}

std::set<std::string> called_operations(const Program& program) {
  std::set<std::string> out;
  collect_ops_block(program.body, out);
  return out;
}

}  // namespace proviq::lang
