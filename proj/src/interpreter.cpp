#include "proviq/interpreter.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

#include "proviq/errors.hpp"
#include "proviq/lang.hpp"
#include "proviq/text.hpp"

namespace proviq {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

nlohmann::json boxes_json(const Box& b) { return {b.x1, b.y1, b.x2, b.y2}; }

std::string counter_text(const CounterMap& c) {
  std::vector<std::string> parts;
  for (const auto& [k, n] : c.entries()) parts.push_back(k + ": " + std::to_string(n));
  return text::join(parts, ", ");
}

}  // namespace

const char* Value::type_name() const noexcept {
  switch (data.index()) {
    case 0: return "clip";
    case 1: return "crops";
    case 2: return "str";
    case 3: return "int";
    case 4: return "bool";
    case 5: return "list";
    case 6: return "counter";
    case 7: return "map";
    case 8: return "tracks";
    case 9: return "choice";
  }
  return "?";
}

bool Value::truthy() const {
  return std::visit(Overloaded{
                        [](const VideoClip& c) { return !c.empty(); },
                        [](const CropClip& c) { return !c.empty(); },
                        [](const std::string& s) { return !s.empty(); },
                        [](std::int64_t i) { return i != 0; },
                        [](bool b) { return b; },
                        [](const ValueList& l) { return !l.empty(); },
                        [](const CounterMap& c) { return !c.empty(); },
                        [](const ValueMap& m) { return !m.empty(); },
                        [](const std::vector<Track>& t) { return !t.empty(); },
                        [](const OptionChoice&) { return true; },
                    },
                    data);
}

std::string Value::to_text() const {
  return std::visit(Overloaded{
                        [](const VideoClip& c) {
                          return "clip of " + std::to_string(c.num_frames()) + " frames [" +
                                 std::to_string(c.start()) + ", " + std::to_string(c.end()) + ")";
                        },
                        [](const CropClip& c) { return std::to_string(c.num_frames()) + " crops"; },
                        [](const std::string& s) { return s; },
                        [](std::int64_t i) { return std::to_string(i); },
                        [](bool b) { return std::string(b ? "True" : "False"); },
                        [](const ValueList& l) {
                          std::vector<std::string> parts;
                          for (const auto& v : l) parts.push_back(v.to_text());
                          return text::join(parts, ", ");
                        },
                        [](const CounterMap& c) { return counter_text(c); },
                        [](const ValueMap& m) {
                          std::vector<std::string> parts;
                          for (const auto& [k, v] : m) parts.push_back(k + ": " + v.to_text());
                          return text::join(parts, "; ");
                        },
                        [](const std::vector<Track>& tracks) {
                          std::vector<std::string> parts;
                          for (const auto& t : tracks) {
                            parts.push_back("track " + std::to_string(t.track_id) + " frames " +
                                            std::to_string(t.points.front().frame) + "-" +
                                            std::to_string(t.points.back().frame));
                          }
                          return text::join(parts, "; ");
                        },
                        [](const OptionChoice& c) { return c.rationale; },
                    },
                    data);
}

nlohmann::json Value::to_json() const {
  using nlohmann::json;
  return std::visit(Overloaded{
                        [](const VideoClip& c) {
                          return json{{"type", "clip"}, {"frames", c.indices()}};
                        },
                        [](const CropClip& c) {
                          json crops = json::array();
                          for (const auto& cr : c.crops()) {
                            crops.push_back({{"frame", cr.frame.index}, {"box", boxes_json(cr.box)}, {"score", cr.score}});
                          }
                          return json{{"type", "crops"}, {"crops", std::move(crops)}};
                        },
                        [](const std::string& s) { return json(s); },
                        [](std::int64_t i) { return json(i); },
                        [](bool b) { return json(b); },
                        [](const ValueList& l) {
                          json out = json::array();
                          for (const auto& v : l) out.push_back(v.to_json());
                          return out;
                        },
                        [](const CounterMap& c) {
                          json out = json::array();
                          for (const auto& [k, n] : c.entries()) out.push_back({k, n});
                          return json{{"type", "counter"}, {"entries", std::move(out)}};
                        },
                        [](const ValueMap& m) {
                          json out = json::array();
                          for (const auto& [k, v] : m) out.push_back({k, v.to_json()});
                          return json{{"type", "map"}, {"entries", std::move(out)}};
                        },
                        [](const std::vector<Track>& tracks) {
                          json out = json::array();
                          for (const auto& t : tracks) {
                            out.push_back({{"track_id", t.track_id},
                                           {"first_frame", t.points.front().frame},
                                           {"last_frame", t.points.back().frame},
                                           {"length", t.points.size()}});
                          }
                          return json{{"type", "tracks"}, {"tracks", std::move(out)}};
                        },
                        [](const OptionChoice& c) {
                          return json{{"type", "choice"}, {"index", c.index}, {"rationale", c.rationale}};
                        },
                    },
                    data);
}

std::string get_max_key(const CounterMap& counts) {
  if (counts.empty()) throw ModuleError(ModuleErrorKind::EmptyCounter, "get_max_key", "no responses to choose from");
  const auto* best = &counts.entries().front();
  for (const auto& e : counts.entries()) {
    if (e.second > best->second) best = &e;
  }
  return best->first;
}

const char* to_string(ExecOutcome outcome) noexcept {
  switch (outcome) {
    case ExecOutcome::Ok: return "ok";
    case ExecOutcome::ModuleFailure: return "module_failure";
    case ExecOutcome::BudgetExceeded: return "budget_exceeded";
    case ExecOutcome::TypeError: return "type_error";
    case ExecOutcome::RuntimeError: return "runtime_error";
  }
  return "?";
}

std::size_t ExecTrace::backend_calls() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.calls.size();
  return n;
}

bool ExecTrace::calls_capability(Capability cap) const {
  for (const auto& e : entries) {
    for (const auto& c : e.calls) {
      if (c.capability == cap) return true;
    }
  }
  return false;
}

std::string ExecTrace::to_jsonl(bool include_durations) const {
  std::ostringstream os;
  for (const auto& e : entries) {
    nlohmann::json calls = nlohmann::json::array();
    for (const auto& c : e.calls) {
      nlohmann::json call{{"capability", to_string(c.capability)},
                          {"request_id", c.request_id},
                          {"summary", c.summary}};
      // Cache hits depend on what ran earlier in the process, like durations.
      if (include_durations) call["cached"] = c.cached;
      if (c.failed) call["error"] = c.error;
      calls.push_back(std::move(call));
    }
    nlohmann::json line{{"step", e.step},        {"statement", e.statement}, {"line", e.line},
                        {"operation", e.operation}, {"args", e.args},         {"calls", std::move(calls)}};
    if (include_durations) line["duration_us"] = e.duration.count();
    os << line.dump() << '\n';
  }
  nlohmann::json last{{"outcome", to_string(outcome)}};
  if (outcome != ExecOutcome::Ok) {
    last["error"] = error;
    if (!error_kind.empty()) last["kind"] = error_kind;
    if (!primitive.empty()) last["primitive"] = primitive;
    if (failed_statement) last["statement"] = *failed_statement;
  }
  os << last.dump() << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

using namespace lang;

class RuntimeError : public Error {
 public:
  using Error::Error;
};

std::string clip_summary(std::string s) {
  constexpr std::size_t kMax = 160;
  if (s.size() > kMax) s = s.substr(0, kMax - 3) + "...";
  return s;
}

class Machine {
 public:
  Machine(const Primitives& prims, const InterpreterConfig& config)
      : prims_(prims), config_(config), log_(config.budget.max_backend_calls),
        started_(std::chrono::steady_clock::now()) {}

  ExecTrace& trace() { return trace_; }

  void bind(const std::string& name, Value v) { set(name, std::move(v)); }

  // Returns the value of the first Return reached.
  std::optional<Value> run_block(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      if (auto v = run(s)) return v;
    }
    return std::nullopt;
  }

  void index(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      order_.emplace(&s, order_.size());
      if (const auto* i = std::get_if<If>(&s.node)) {
        index(i->then_body);
        index(i->else_body);
      }
    }
  }

  void record_failure(ExecOutcome outcome, const std::string& message) {
    trace_.outcome = outcome;
    trace_.error = message;
    if (current_) trace_.failed_statement = current_->statement;
    flush_current();
  }

  void set_kind(std::string kind, std::string primitive = {}) {
    trace_.error_kind = std::move(kind);
    trace_.primitive = std::move(primitive);
  }

  void flush_current() {
    if (!current_) return;
    auto calls = log_.drain();
    current_->calls.insert(current_->calls.end(), calls.begin(), calls.end());
    current_->duration = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - current_start_);
    trace_.entries.push_back(std::move(*current_));
    current_.reset();
  }

 private:
  std::optional<Value> run(const Stmt& s) {
    if (trace_.entries.size() >= config_.budget.max_statements) throw BudgetExceeded(BudgetKind::Statements);
    check_clock();
    begin(s);
    std::optional<Value> result;
    std::visit(Overloaded{
                   [&](const Assign& a) {
                     current_->operation = operation_of(a.value, "assign");
                     current_->args = clip_summary(a.target + " = " + render(a.value));
                     set(a.target, eval(a.value));
                     flush_current();
                   },
                   [&](const Return& r) {
                     current_->operation = operation_of(r.value, "return");
                     current_->args = clip_summary("return " + render(r.value));
                     result = eval(r.value);
                     flush_current();
                   },
                   [&](const If& i) {
                     current_->operation = "if";
                     current_->args = clip_summary(render(i.cond));
                     const bool taken = eval(i.cond).truthy();
                     flush_current();
                     result = run_block(taken ? i.then_body : i.else_body);
                   },
               },
               s.node);
    check_clock();
    return result;
  }

  void begin(const Stmt& s) {
    current_.emplace();
    current_->step = trace_.entries.size();
    auto it = order_.find(&s);
    current_->statement = it == order_.end() ? 0 : it->second;
    current_->line = s.pos.line;
    current_start_ = std::chrono::steady_clock::now();
  }

  static std::string operation_of(const Expr& e, const char* fallback) {
    if (const auto* m = std::get_if<MethodCall>(&e.node)) return m->method;
    if (const auto* b = std::get_if<BuiltinCall>(&e.node)) return b->name;
    return fallback;
  }

  void check_clock() const {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started_;
    if (elapsed.count() > config_.budget.wall_clock_limit_s) throw BudgetExceeded(BudgetKind::WallClock);
  }

  void set(const std::string& name, Value v) {
    for (auto& [k, existing] : env_) {
      if (k == name) {
        existing = std::move(v);
        return;
      }
    }
    env_.emplace_back(name, std::move(v));
  }

  const Value& get(const std::string& name) const {
    for (const auto& [k, v] : env_) {
      if (k == name) return v;
    }
    throw RuntimeError("name '" + name + "' is not defined");
  }

  template <typename T>
  static const T& expect(const Value& v, const std::string& op, const char* expected) {
    if (!v.is<T>()) throw TypeError(op, expected, v.type_name());
    return v.as<T>();
  }

  Value eval(const Expr& e) {
    return std::visit([&](const auto& n) { return eval_node(n); }, e.node);
  }

  Value eval_node(const Literal& l) {
    return std::visit([](const auto& x) { return Value{x}; }, l.value);
  }

  Value eval_node(const Name& n) { return get(n.id); }

  Value eval_node(const Attribute& a) {
    const Value r = eval(*a.receiver);
    if (a.name != "num_frames") throw RuntimeError("unknown attribute '" + a.name + "'");
    if (r.is<VideoClip>()) return Value{r.as<VideoClip>().num_frames()};
    if (r.is<CropClip>()) return Value{r.as<CropClip>().num_frames()};
    throw TypeError(".num_frames", "clip", r.type_name());
  }

  Value eval_node(const Arith& a) {
    const Value l = eval(*a.lhs);
    const Value r = eval(*a.rhs);
    const std::string op = to_string(a.op);
    if (a.op == ArithOp::Add && l.is<std::string>() && r.is<std::string>()) {
      return Value{l.as<std::string>() + r.as<std::string>()};
    }
    if (a.op == ArithOp::Add && l.is<ValueList>() && r.is<ValueList>()) {
      ValueList out = l.as<ValueList>();
      out.insert(out.end(), r.as<ValueList>().begin(), r.as<ValueList>().end());
      return Value{std::move(out)};
    }
    const auto x = expect<std::int64_t>(l, op, "int");
    const auto y = expect<std::int64_t>(r, op, "int");
    std::int64_t out = 0;
    bool overflow = false;
    switch (a.op) {
      case ArithOp::Add: overflow = __builtin_add_overflow(x, y, &out); break;
      case ArithOp::Sub: overflow = __builtin_sub_overflow(x, y, &out); break;
      case ArithOp::Mul: overflow = __builtin_mul_overflow(x, y, &out); break;
      case ArithOp::FloorDiv:
        if (y == 0) throw RuntimeError("integer division by zero");
        if (x == std::numeric_limits<std::int64_t>::min() && y == -1) {
          overflow = true;
          break;
        }
        out = x / y;
        if ((x % y != 0) && ((x < 0) != (y < 0))) --out;
        break;
    }
    if (overflow) throw RuntimeError("integer overflow in '" + op + "'");
    return Value{out};
  }

  static bool equal(const Value& l, const Value& r) {
    if (l.data.index() != r.data.index()) return false;
    if (l.is<std::string>()) return l.as<std::string>() == r.as<std::string>();
    if (l.is<std::int64_t>()) return l.as<std::int64_t>() == r.as<std::int64_t>();
    if (l.is<bool>()) return l.as<bool>() == r.as<bool>();
    if (l.is<OptionChoice>()) return l.as<OptionChoice>() == r.as<OptionChoice>();
    if (l.is<CounterMap>()) return l.as<CounterMap>() == r.as<CounterMap>();
    if (l.is<ValueList>()) {
      const auto& a = l.as<ValueList>();
      const auto& b = r.as<ValueList>();
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!equal(a[i], b[i])) return false;
      }
      return true;
    }
    if (l.is<VideoClip>()) return l.as<VideoClip>().indices() == r.as<VideoClip>().indices();
    throw TypeError("==", "comparable values", l.type_name());
  }

  Value eval_node(const Compare& c) {
    const Value l = eval(*c.lhs);
    const Value r = eval(*c.rhs);
    if (c.op == CompareOp::Eq) return Value{equal(l, r)};
    if (c.op == CompareOp::Ne) return Value{!equal(l, r)};
    const std::string op = to_string(c.op);
    int cmp = 0;
    if (l.is<std::int64_t>() && r.is<std::int64_t>()) {
      const auto x = l.as<std::int64_t>(), y = r.as<std::int64_t>();
      cmp = x < y ? -1 : (x > y ? 1 : 0);
    } else if (l.is<std::string>() && r.is<std::string>()) {
      cmp = l.as<std::string>().compare(r.as<std::string>());
    } else {
      throw TypeError(op, std::string("two ints or two strs"), std::string(l.type_name()) + " and " + r.type_name());
    }
    switch (c.op) {
      case CompareOp::Lt: return Value{cmp < 0};
      case CompareOp::Le: return Value{cmp <= 0};
      case CompareOp::Gt: return Value{cmp > 0};
      case CompareOp::Ge: return Value{cmp >= 0};
      default: break;
    }
    return Value{false};
  }

  Value eval_node(const Logical& l) {
    Value lhs = eval(*l.lhs);
    const bool t = lhs.truthy();
    if (l.op == LogicalOp::And) return t ? eval(*l.rhs) : lhs;
    return t ? lhs : eval(*l.rhs);
  }

  Value eval_node(const Not& n) { return Value{!eval(*n.operand).truthy()}; }

  Value eval_node(const ListLiteral& l) {
    ValueList out;
    for (const auto& item : l.items) out.push_back(eval(item));
    return Value{std::move(out)};
  }

  Value eval_node(const MapLiteral& m) {
    ValueMap out;
    for (const auto& [k, v] : m.pairs) {
      const Value key = eval(k);
      const auto& name = expect<std::string>(key, "{...}", "str key");
      Value val = eval(v);
      auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == name; });
      if (it != out.end()) {
        it->second = std::move(val);
      } else {
        out.emplace_back(name, std::move(val));
      }
    }
    return Value{std::move(out)};
  }

  static std::size_t position(std::int64_t i, std::size_t size) {
    const auto n = static_cast<std::int64_t>(size);
    const std::int64_t p = i < 0 ? i + n : i;
    if (p < 0 || p >= n) {
      throw ModuleError(ModuleErrorKind::IndexOutOfRange, "[]",
                        "index " + std::to_string(i) + " outside a sequence of length " + std::to_string(n));
    }
    return static_cast<std::size_t>(p);
  }

  Value eval_node(const IndexAccess& a) {
    const Value r = eval(*a.receiver);
    const Value k = eval(*a.key);
    if (r.is<ValueList>()) {
      const auto& l = r.as<ValueList>();
      return l[position(expect<std::int64_t>(k, "[]", "int"), l.size())];
    }
    if (r.is<std::string>()) {
      const auto& s = r.as<std::string>();
      return Value{std::string(1, s[position(expect<std::int64_t>(k, "[]", "int"), s.size())])};
    }
    if (r.is<ValueMap>()) {
      const auto& key = expect<std::string>(k, "[]", "str");
      for (const auto& [name, v] : r.as<ValueMap>()) {
        if (name == key) return v;
      }
      throw RuntimeError("key '" + key + "' not in map");
    }
    if (r.is<CounterMap>()) {
      return Value{r.as<CounterMap>().count(expect<std::string>(k, "[]", "str"))};
    }
    throw TypeError("[]", "list, str, map or counter", r.type_name());
  }

  Value eval_node(const BuiltinCall& b) {
    std::vector<Value> args;
    for (const auto& a : b.args) args.push_back(eval(a));
    if (b.name == "len") {
      if (args.size() != 1) throw RuntimeError("len() takes 1 argument");
      const Value& v = args[0];
      std::int64_t n = 0;
      if (v.is<VideoClip>()) {
        n = v.as<VideoClip>().num_frames();
      } else if (v.is<CropClip>()) {
        n = v.as<CropClip>().num_frames();
      } else if (v.is<std::string>()) {
        n = static_cast<std::int64_t>(v.as<std::string>().size());
      } else if (v.is<ValueList>()) {
        n = static_cast<std::int64_t>(v.as<ValueList>().size());
      } else if (v.is<CounterMap>()) {
        n = static_cast<std::int64_t>(v.as<CounterMap>().entries().size());
      } else if (v.is<ValueMap>()) {
        n = static_cast<std::int64_t>(v.as<ValueMap>().size());
      } else if (v.is<std::vector<Track>>()) {
        n = static_cast<std::int64_t>(v.as<std::vector<Track>>().size());
      } else {
        throw TypeError("len", "sized value", v.type_name());
      }
      return Value{n};
    }
    if (b.name == "get_max_key") {
      if (args.size() != 1) throw RuntimeError("get_max_key() takes 1 argument");
      const Value& v = args[0];
      if (v.is<CounterMap>()) return Value{get_max_key(v.as<CounterMap>())};
      if (v.is<ValueMap>()) {
        CounterMap counts;
        for (const auto& [k, n] : v.as<ValueMap>()) counts.add(k, expect<std::int64_t>(n, "get_max_key", "int count"));
        return Value{get_max_key(counts)};
      }
      throw TypeError("get_max_key", "counter", v.type_name());
    }
    throw RuntimeError("unknown builtin '" + b.name + "'");
  }

  static std::vector<std::string> string_list(const Value& v, const std::string& op) {
    const auto& l = expect<ValueList>(v, op, "list of str");
    std::vector<std::string> out;
    for (const auto& item : l) out.push_back(expect<std::string>(item, op, "list of str"));
    return out;
  }

  ContextBlocks context_blocks(const Value& v) {
    ContextBlocks out;
    if (v.is<ValueMap>()) {
      for (const auto& [k, item] : v.as<ValueMap>()) out.emplace_back(k, item.to_text());
    } else {
      out.emplace_back("context", v.to_text());
    }
    return out;
  }

  Value eval_node(const MethodCall& m) {
    const Value recv = eval(*m.receiver);
    std::vector<Value> args;
    for (const auto& a : m.args) args.push_back(eval(a));
    const std::string& name = m.method;
    auto arity = [&](std::size_t lo, std::size_t hi) {
      if (args.size() < lo || args.size() > hi) {
        throw RuntimeError(name + "() got " + std::to_string(args.size()) + " arguments");
      }
    };
    const bool crops = recv.is<CropClip>();
    if (!crops && !recv.is<VideoClip>()) throw TypeError(name, "clip", recv.type_name());
    const auto& source = crops ? recv.as<CropClip>().source_ptr() : recv.as<VideoClip>().source_ptr();
    CallLog* log = &log_;

    if (name == "filter_property" || name == "filter_object" || name == "find") {
      arity(1, 1);
      const auto& what = expect<std::string>(args[0], name, "str");
      if (name == "filter_property") {
        return crops ? Value{prims_.filter_property(recv.as<CropClip>(), what, log)}
                     : Value{prims_.filter_property(recv.as<VideoClip>(), what, log)};
      }
      if (name == "filter_object") {
        return crops ? Value{prims_.filter_object(recv.as<CropClip>(), what, log)}
                     : Value{prims_.filter_object(recv.as<VideoClip>(), what, log)};
      }
      return crops ? Value{prims_.find(recv.as<CropClip>(), what, log)}
                   : Value{prims_.find(recv.as<VideoClip>(), what, log)};
    }
    if (name == "video_query") {
      arity(1, 2);
      const auto& q = expect<std::string>(args[0], name, "str");
      if (args.size() == 2) string_list(args[1], name);
      return crops ? Value{prims_.video_query(recv.as<CropClip>(), q, log)}
                   : Value{prims_.video_query(recv.as<VideoClip>(), q, log)};
    }
    if (name == "get_caption") {
      arity(1, 1);
      const auto i = expect<std::int64_t>(args[0], name, "int");
      return crops ? Value{prims_.get_caption(recv.as<CropClip>(), i, log)}
                   : Value{prims_.get_caption(recv.as<VideoClip>(), i, log)};
    }
    if (name == "get_script") {
      arity(0, 0);
      return Value{prims_.get_script(*source, log)};
    }
    if (name == "get_summary") {
      arity(0, 0);
      return Value{get_summary(*source, prims_.gateway(), config_.summarizer, log).paragraph};
    }
    if (name == "choose_option") {
      arity(3, 3);
      const auto& q = expect<std::string>(args[0], name, "str");
      const auto options = string_list(args[2], name);
      return Value{prims_.choose_option(source->video_id, q, context_blocks(args[1]), options, log)};
    }
    if (name == "trim") {
      arity(2, 2);
      if (crops) throw TypeError(name, "clip", recv.type_name());
      const auto a = expect<std::int64_t>(args[0], name, "int");
      const auto b = expect<std::int64_t>(args[1], name, "int");
      try {
        return Value{trim(recv.as<VideoClip>(), a, b)};
      } catch (const InvalidArgument& e) {
        throw ModuleError(ModuleErrorKind::InvalidArgument, "trim", e.what());
      }
    }
    if (name == "track_objects") {
      arity(0, 1);
      return Value{track(recv, args)};
    }
    throw RuntimeError("unknown method '" + name + "'");
  }

  std::vector<Track> track(const Value& recv, const std::vector<Value>& args) {
    std::vector<std::vector<Detection>> frames;
    auto from_crops = [&](const CropClip& c) {
      for (const auto& cr : c.crops()) {
        if (frames.empty() || frames.back().front().frame != cr.frame.index) frames.emplace_back();
        frames.back().push_back(Detection{cr.frame.index, cr.box, cr.score});
      }
    };
    if (args.empty()) {
      if (!recv.is<CropClip>()) throw TypeError("track_objects", "crops receiver or argument", recv.type_name());
      from_crops(recv.as<CropClip>());
    } else if (args[0].is<CropClip>()) {
      from_crops(args[0].as<CropClip>());
    } else if (args[0].is<std::string>()) {
      if (!recv.is<VideoClip>()) throw TypeError("track_objects", "clip receiver", recv.type_name());
      const auto& clip = recv.as<VideoClip>();
      const auto boxes = prims_.detect(clip, args[0].as<std::string>(), config_.tracker.low_threshold, &log_);
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        std::vector<Detection> dets;
        for (const auto& b : boxes[i]) dets.push_back(Detection{clip.frames()[i].index, b.box, b.score});
        frames.push_back(std::move(dets));
      }
    } else {
      throw TypeError("track_objects", "crops or str", args[0].type_name());
    }
    try {
      return track_objects(frames, config_.tracker);
    } catch (const InvalidArgument& e) {
      throw ModuleError(ModuleErrorKind::InvalidArgument, "track_objects", e.what());
    }
  }

  const Primitives& prims_;
  const InterpreterConfig& config_;
  CallLog log_;
  std::chrono::steady_clock::time_point started_;
  std::chrono::steady_clock::time_point current_start_;
  std::vector<std::pair<std::string, Value>> env_;
  std::map<const Stmt*, std::size_t> order_;
  std::optional<TraceEntry> current_;
  ExecTrace trace_;
};

}  // namespace

ExecResult execute(const lang::Program& program, const VideoClip& clip, const std::vector<std::string>& options,
                   const Primitives& primitives, const InterpreterConfig& config) {
  Machine m(primitives, config);
  m.index(program.body);
  ExecResult result;
  try {
    if (program.params.empty() || program.params.size() > 2) {
      throw RuntimeError("entry function must take one or two parameters");
    }
    m.bind(program.params[0], Value{clip});
    if (program.params.size() == 2) {
      ValueList opts;
      for (const auto& o : options) opts.push_back(Value{o});
      m.bind(program.params[1], Value{std::move(opts)});
    }
    result.value = m.run_block(program.body);
    if (!result.value) throw RuntimeError("program finished without returning a value");
  } catch (const ModuleError& e) {
    m.set_kind(to_string(e.kind()), e.primitive());
    m.record_failure(ExecOutcome::ModuleFailure, e.what());
  } catch (const BudgetExceeded& e) {
    m.set_kind(to_string(e.which()));
    m.record_failure(ExecOutcome::BudgetExceeded, e.what());
  } catch (const TypeError& e) {
    m.record_failure(ExecOutcome::TypeError, e.what());
  } catch (const Error& e) {
    m.record_failure(ExecOutcome::RuntimeError, e.what());
  }
  result.trace = std::move(m.trace());
  if (!result.ok()) result.value.reset();
  return result;
}

}  // namespace proviq
