#include <charconv>
#include <optional>
#include <limits>

#include "lexer.hpp"
#include "proviq/errors.hpp"
#include "proviq/lang.hpp"

namespace proviq::lang {
namespace {

using detail::Tok;
using detail::Token;

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    skip_newlines();
    if (!is_keyword("def")) fail(peek().pos, "program must start with a function definition");
    Program prog;
    prog.pos = next().pos;
    prog.entry_name = expect(Tok::Name, "function name").text;
    expect_op("(");
    if (!is_op(")")) {
      while (true) {
        prog.params.push_back(expect(Tok::Name, "parameter name").text);
        if (is_op("=")) fail(peek().pos, "default parameter values are not supported");
        if (is_op(":")) fail(peek().pos, "type annotations are not supported");
        if (!accept_op(",")) break;
        if (is_op(")")) break;
      }
    }
    expect_op(")");
    if (is_op("->")) fail(peek().pos, "return annotations are not supported");
    expect_op(":");
    prog.body = block();
    skip_newlines();
    if (peek().kind != Tok::End) {
      if (is_keyword("def")) fail(peek().pos, "only one function definition is allowed");
      fail(peek().pos, "unexpected '" + peek().text + "' after function body");
    }
    return prog;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const auto i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_op(std::string_view op) const { return peek().kind == Tok::Op && peek().text == op; }
  bool is_keyword(std::string_view kw) const {
    return peek().kind == Tok::Keyword && peek().text == kw;
  }
  bool accept_op(std::string_view op) {
    if (!is_op(op)) return false;
    next();
    return true;
  }
  [[noreturn]] static void fail(Pos pos, const std::string& msg) {
    throw SyntaxError(pos.line, pos.col, msg);
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::Newline: return "end of line";
      case Tok::Indent: return "indent";
      case Tok::Dedent: return "dedent";
      case Tok::End: return "end of input";
      case Tok::String: return "string literal";
      default: return "'" + t.text + "'";
    }
  }
  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(peek().pos, "expected " + what + ", found " + describe(peek()));
    return next();
  }
  void expect_op(std::string_view op) {
    if (!is_op(op)) {
      fail(peek().pos, "expected '" + std::string(op) + "', found " + describe(peek()));
    }
    next();
  }
  void skip_newlines() {
    while (peek().kind == Tok::Newline) next();
  }

  std::vector<Stmt> block() {
    if (peek().kind != Tok::Newline) {
      // Single-line suite: `if x: return y`.
      std::vector<Stmt> body;
      body.push_back(simple_statement());
      return body;
    }
    next();
    if (peek().kind != Tok::Indent) fail(peek().pos, "expected an indented block");
    next();
    std::vector<Stmt> body;
    while (peek().kind != Tok::Dedent && peek().kind != Tok::End) {
      body.push_back(statement());
    }
    if (peek().kind == Tok::Dedent) next();
    return body;
  }

  Stmt statement() {
    if (is_keyword("if")) return if_statement();
    if (is_keyword("elif") || is_keyword("else")) {
      fail(peek().pos, "'" + peek().text + "' without matching 'if'");
    }
    if (is_keyword("def")) fail(peek().pos, "nested function definitions are not allowed");
    return simple_statement();
  }

  Stmt simple_statement() {
    const Pos pos = peek().pos;
    if (is_keyword("return")) {
      next();
      if (peek().kind == Tok::Newline) fail(peek().pos, "return requires a value");
      Stmt s{Return{expression()}, pos};
      end_of_statement();
      return s;
    }
    if (peek().kind == Tok::Name && peek(1).kind == Tok::Op && peek(1).text == "=") {
      std::string target = next().text;
      next();
      Stmt s{Assign{std::move(target), expression()}, pos};
      end_of_statement();
      return s;
    }
    if (peek().kind == Tok::Newline || peek().kind == Tok::Indent) {
      fail(pos, "expected a statement, found " + describe(peek()));
    }
    expression();
    if (is_op("=") || is_op(",")) fail(pos, "only simple name assignment is supported");
    fail(pos, "expression statements are not allowed; expected assignment, return or if");
  }

  void end_of_statement() {
    if (is_op("=")) fail(peek().pos, "only simple name assignment is supported");
    if (peek().kind != Tok::Newline) {
      fail(peek().pos, "expected end of line, found " + describe(peek()));
    }
    next();
  }

  Stmt if_statement() {
    const Pos pos = next().pos;  // 'if' or 'elif'
    Expr cond = expression();
    expect_op(":");
    If node{std::move(cond), block(), {}};
    if (is_keyword("elif")) {
      node.else_body.push_back(if_statement());
    } else if (is_keyword("else")) {
      next();
      expect_op(":");
      node.else_body = block();
    }
    return Stmt{std::move(node), pos};
  }

  Expr expression() { return or_expr(); }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (is_keyword("or")) {
      const Pos pos = next().pos;
      Expr rhs = and_expr();
      lhs = Expr{Logical{LogicalOp::Or, std::move(lhs), std::move(rhs)}, pos};
    }
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = not_expr();
    while (is_keyword("and")) {
      const Pos pos = next().pos;
      Expr rhs = not_expr();
      lhs = Expr{Logical{LogicalOp::And, std::move(lhs), std::move(rhs)}, pos};
    }
    return lhs;
  }

  Expr not_expr() {
    if (is_keyword("not")) {
      const Pos pos = next().pos;
      return Expr{Not{not_expr()}, pos};
    }
    return comparison();
  }

  std::optional<CompareOp> compare_op() const {
    if (peek().kind != Tok::Op) return std::nullopt;
    const auto& t = peek().text;
    if (t == "==") return CompareOp::Eq;
    if (t == "!=") return CompareOp::Ne;
    if (t == "<") return CompareOp::Lt;
    if (t == "<=") return CompareOp::Le;
    if (t == ">") return CompareOp::Gt;
    if (t == ">=") return CompareOp::Ge;
    return std::nullopt;
  }

  Expr comparison() {
    Expr lhs = arith();
    if (auto op = compare_op()) {
      const Pos pos = next().pos;
      Expr rhs = arith();
      if (compare_op()) fail(peek().pos, "chained comparisons are not supported");
      return Expr{Compare{*op, std::move(lhs), std::move(rhs)}, pos};
    }
    return lhs;
  }

  Expr arith() {
    Expr lhs = term();
    while (is_op("+") || is_op("-")) {
      const Pos pos = peek().pos;
      const auto op = next().text == "+" ? ArithOp::Add : ArithOp::Sub;
      Expr rhs = term();
      lhs = Expr{Arith{op, std::move(lhs), std::move(rhs)}, pos};
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (is_op("*") || is_op("//")) {
      const Pos pos = peek().pos;
      const auto op = next().text == "*" ? ArithOp::Mul : ArithOp::FloorDiv;
      Expr rhs = unary();
      lhs = Expr{Arith{op, std::move(lhs), std::move(rhs)}, pos};
    }
    return lhs;
  }

  Expr unary() {
    if (is_op("-")) {
      const Pos pos = next().pos;
      if (peek().kind != Tok::Int) fail(pos, "unary minus is only supported on integer literals");
      return Expr{Literal{integer(next(), true)}, pos};
    }
    return postfix();
  }

  static std::int64_t integer(const Token& t, bool negative) {
    unsigned long long v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    constexpr auto kMax = static_cast<unsigned long long>(std::numeric_limits<std::int64_t>::max());
    if (ec != std::errc() || v > kMax) fail(t.pos, "integer literal out of range");
    return negative ? -static_cast<std::int64_t>(v) : static_cast<std::int64_t>(v);
  }

  std::vector<Expr> call_args() {
    std::vector<Expr> args;
    expect_op("(");
    while (!is_op(")")) {
      if (peek().kind == Tok::Name && peek(1).kind == Tok::Op && peek(1).text == "=") {
        fail(peek().pos, "keyword arguments are not supported");
      }
      if (is_op("*")) fail(peek().pos, "argument unpacking is not supported");
      args.push_back(expression());
      if (!accept_op(",")) break;
    }
    expect_op(")");
    return args;
  }

  Expr postfix() {
    Expr e = atom();
    while (true) {
      if (is_op(".")) {
        next();
        const Token& name = expect(Tok::Name, "attribute or method name");
        if (is_op("(")) {
          auto args = call_args();
          e = Expr{MethodCall{std::move(e), name.text, std::move(args)}, name.pos};
        } else {
          e = Expr{Attribute{std::move(e), name.text}, name.pos};
        }
      } else if (is_op("[")) {
        const Pos pos = next().pos;
        if (is_op(":")) fail(pos, "slicing is not supported");
        Expr key = expression();
        if (is_op(":")) fail(peek().pos, "slicing is not supported");
        expect_op("]");
        e = Expr{IndexAccess{std::move(e), std::move(key)}, pos};
      } else if (is_op("(")) {
        fail(peek().pos, "only named functions and methods can be called");
      } else {
        return e;
      }
    }
  }

  Expr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: {
        next();
        return Expr{Literal{integer(t, false)}, t.pos};
      }
      case Tok::String: {
        next();
        if (peek().kind == Tok::String) fail(peek().pos, "implicit string concatenation is not supported");
        return Expr{Literal{t.text}, t.pos};
      }
      case Tok::Keyword:
        if (t.text == "True" || t.text == "False") {
          next();
          return Expr{Literal{t.text == "True"}, t.pos};
        }
        break;
      case Tok::Name: {
        next();
        if (is_op("(")) {
          auto args = call_args();
          return Expr{BuiltinCall{t.text, std::move(args)}, t.pos};
        }
        return Expr{Name{t.text}, t.pos};
      }
      case Tok::Op:
        if (t.text == "(") {
          next();
          Expr inner = expression();
          if (is_op(",")) fail(peek().pos, "tuples are not supported");
          expect_op(")");
          return inner;
        }
        if (t.text == "[") return list_literal();
        if (t.text == "{") return map_literal();
        break;
      default:
        break;
    }
    fail(t.pos, "expected an expression, found " + describe(t));
  }

  Expr list_literal() {
    const Pos pos = next().pos;
    ListLiteral list;
    while (!is_op("]")) {
      list.items.push_back(expression());
      if (is_keyword("for")) fail(peek().pos, "comprehensions are not supported");
      if (!accept_op(",")) break;
    }
    expect_op("]");
    return Expr{std::move(list), pos};
  }

  Expr map_literal() {
    const Pos pos = next().pos;
    MapLiteral map;
    while (!is_op("}")) {
      Expr key = expression();
      if (!is_op(":")) fail(peek().pos, "expected ':' in map literal (sets are not supported)");
      next();
      Expr value = expression();
      map.pairs.emplace_back(std::move(key), std::move(value));
      if (!accept_op(",")) break;
    }
    expect_op("}");
    return Expr{std::move(map), pos};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse(std::string_view source) { return Parser(detail::lex(source)).program(); }

}  // namespace proviq::lang
