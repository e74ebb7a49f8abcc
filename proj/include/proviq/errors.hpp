#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace proviq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Schema violation while loading a file; `pointer` is a JSON-pointer-style path.
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& message)
      : Error(pointer + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + message),
        line_(line), col_(col), message_(message) {}
  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }
  const std::string& message() const noexcept { return message_; }

 private:
  int line_;
  int col_;
  std::string message_;
};

// Backend failures.
class BackendUnavailable : public Error {
 public:
  BackendUnavailable(const std::string& endpoint, const std::string& cause)
      : Error("backend unavailable: " + endpoint + ": " + cause) {}
};

class MalformedResponse : public Error {
 public:
  using Error::Error;
};

class MockMiss : public Error {
 public:
  MockMiss(const std::string& video, long long frame, const std::string& key)
      : Error("mock miss: video '" + video + "' frame " + std::to_string(frame) +
              " key '" + key + "'") {}
};

enum class ModuleErrorKind {
  Backend,
  EmptyClip,
  EmptyCounter,
  IndexOutOfRange,
  NoTranscript,
  UnparseableChoice,
  SummaryFailed,
  InvalidArgument,
};

const char* to_string(ModuleErrorKind kind) noexcept;

/// Failure inside a visual primitive. Aborts the running program.
class ModuleError : public Error {
 public:
  ModuleError(ModuleErrorKind kind, std::string primitive, const std::string& detail)
      : Error(primitive + ": " + to_string(kind) + ": " + detail),
        kind_(kind), primitive_(std::move(primitive)) {}
  ModuleErrorKind kind() const noexcept { return kind_; }
  const std::string& primitive() const noexcept { return primitive_; }

 private:
  ModuleErrorKind kind_;
  std::string primitive_;
};

enum class BudgetKind { Statements, BackendCalls, WallClock };

const char* to_string(BudgetKind kind) noexcept;

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(BudgetKind which)
      : Error(std::string("budget exceeded: ") + to_string(which)), which_(which) {}
  BudgetKind which() const noexcept { return which_; }

 private:
  BudgetKind which_;
};

class TypeError : public Error {
 public:
  TypeError(const std::string& operation, const std::string& expected, const std::string& got)
      : Error("type error in " + operation + ": expected " + expected + ", got " + got) {}
};

class GenerationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace proviq
