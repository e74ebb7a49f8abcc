#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace proviq::lang {

/// Owning, deep-copying pointer so recursive AST nodes keep value semantics.
template <typename T>
class Indirect {
 public:
  Indirect() : ptr_(std::make_unique<T>()) {}
  Indirect(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT
  Indirect(const Indirect& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Indirect(Indirect&&) noexcept = default;
  Indirect& operator=(const Indirect& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Indirect& operator=(Indirect&&) noexcept = default;

  const T& operator*() const { return *ptr_; }
  T& operator*() { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  T* operator->() { return ptr_.get(); }

  friend bool operator==(const Indirect& a, const Indirect& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

/// 1-based source position.
struct Pos {
  int line = 0;
  int col = 0;
};

struct Expr;

struct Literal {
  std::variant<std::string, std::int64_t, bool> value;
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Name {
  std::string id;
  friend bool operator==(const Name&, const Name&) = default;
};

struct MethodCall {
  Indirect<Expr> receiver;
  std::string method;
  std::vector<Expr> args;
  friend bool operator==(const MethodCall&, const MethodCall&) = default;
};

struct BuiltinCall {
  std::string name;
  std::vector<Expr> args;
  friend bool operator==(const BuiltinCall&, const BuiltinCall&) = default;
};

struct Attribute {
  Indirect<Expr> receiver;
  std::string name;
  friend bool operator==(const Attribute&, const Attribute&) = default;
};

enum class ArithOp { Add, Sub, Mul, FloorDiv };
enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class LogicalOp { And, Or };

struct Arith {
  ArithOp op;
  Indirect<Expr> lhs;
  Indirect<Expr> rhs;
  friend bool operator==(const Arith&, const Arith&) = default;
};

struct Compare {
  CompareOp op;
  Indirect<Expr> lhs;
  Indirect<Expr> rhs;
  friend bool operator==(const Compare&, const Compare&) = default;
};

struct Logical {
  LogicalOp op;
  Indirect<Expr> lhs;
  Indirect<Expr> rhs;
  friend bool operator==(const Logical&, const Logical&) = default;
};

struct Not {
  Indirect<Expr> operand;
  friend bool operator==(const Not&, const Not&) = default;
};

struct ListLiteral {
  std::vector<Expr> items;
  friend bool operator==(const ListLiteral&, const ListLiteral&) = default;
};

struct MapLiteral {
  std::vector<std::pair<Expr, Expr>> pairs;  // insertion order preserved
  friend bool operator==(const MapLiteral&, const MapLiteral&) = default;
};

struct IndexAccess {
  Indirect<Expr> receiver;
  Indirect<Expr> key;
  friend bool operator==(const IndexAccess&, const IndexAccess&) = default;
};

struct Expr {
  using Node = std::variant<Literal, Name, MethodCall, BuiltinCall, Attribute, Arith, Compare,
                            Logical, Not, ListLiteral, MapLiteral, IndexAccess>;
  Node node;
  Pos pos;

  // Structural equality ignores positions.
  friend bool operator==(const Expr& a, const Expr& b) { return a.node == b.node; }
};

struct Stmt;

struct Assign {
  std::string target;
  Expr value;
  friend bool operator==(const Assign&, const Assign&) = default;
};

struct Return {
  Expr value;
  friend bool operator==(const Return&, const Return&) = default;
};

struct If {
  Expr cond;
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
  friend bool operator==(const If&, const If&) = default;
};

struct Stmt {
  std::variant<Assign, Return, If> node;
  Pos pos;
  friend bool operator==(const Stmt& a, const Stmt& b) { return a.node == b.node; }
};

struct Program {
  std::string entry_name;
  std::vector<std::string> params;
  std::vector<Stmt> body;
  Pos pos;
  friend bool operator==(const Program& a, const Program& b) {
    return a.entry_name == b.entry_name && a.params == b.params && a.body == b.body;
  }
};

const char* to_string(ArithOp op) noexcept;
const char* to_string(CompareOp op) noexcept;
const char* to_string(LogicalOp op) noexcept;

}  // namespace proviq::lang
