#include "lexer.hpp"

#include <array>
#include <cctype>

#include "proviq/errors.hpp"

namespace proviq::lang::detail {
namespace {

constexpr std::array kKeywords = {"def", "return", "if", "elif", "else", "and",
                                  "or",  "not",    "True", "False"};

// Python constructs outside the language; named explicitly in diagnostics.
constexpr std::array kForbidden = {"for",    "while",  "import", "from",  "class",  "lambda",
                                   "with",   "try",    "except", "finally", "raise", "global",
                                   "nonlocal", "del",  "yield",  "assert", "pass",  "break",
                                   "continue", "async", "await", "None",  "is",    "in",
                                   "exec",   "eval"};

bool is_in(std::string_view word, const auto& table) {
  for (std::string_view k : table) {
    if (k == word) return true;
  }
  return false;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    while (i_ < src_.size()) {
      line_start();
    }
    if (depth_ > 0) fail(here(), "unclosed bracket at end of input");
    if (!out_.empty() && out_.back().kind != Tok::Newline) emit(Tok::Newline, "", here());
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(Tok::Dedent, "", here());
    }
    emit(Tok::End, "", here());
    return std::move(out_);
  }

 private:
  Pos here() const { return Pos{line_, static_cast<int>(i_ - line_begin_) + 1}; }

  void emit(Tok kind, std::string text, Pos pos) { out_.push_back(Token{kind, std::move(text), pos}); }

  [[noreturn]] void fail(Pos pos, const std::string& msg) const {
    throw SyntaxError(pos.line, pos.col, msg);
  }

  void newline() {
    ++i_;
    ++line_;
    line_begin_ = i_;
  }

  // Handles indentation at the start of a physical line, then its tokens.
  void line_start() {
    int width = 0;
    while (i_ < src_.size() && (src_[i_] == ' ' || src_[i_] == '\t')) {
      if (src_[i_] == '\t') fail(here(), "tabs are not allowed in indentation");
      ++width;
      ++i_;
    }
    if (i_ >= src_.size()) return;
    if (src_[i_] == '\n' || src_[i_] == '\r' || src_[i_] == '#') {
      skip_comment();
      if (i_ < src_.size() && src_[i_] == '\r') ++i_;
      if (i_ < src_.size() && src_[i_] == '\n') newline();
      return;
    }
    const Pos pos = here();
    if (width > indents_.back()) {
      indents_.push_back(width);
      emit(Tok::Indent, "", pos);
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        emit(Tok::Dedent, "", pos);
      }
      if (width != indents_.back()) fail(pos, "inconsistent dedent");
    }
    tokens_until_eol();
  }

  void skip_comment() {
    if (i_ < src_.size() && src_[i_] == '#') {
      while (i_ < src_.size() && src_[i_] != '\n') ++i_;
    }
  }

  void tokens_until_eol() {
    while (i_ < src_.size()) {
      const char c = src_[i_];
      if (c == '\n' || c == '\r') {
        if (c == '\r') ++i_;
        if (depth_ == 0) emit(Tok::Newline, "", here());
        if (i_ < src_.size() && src_[i_] == '\n') newline();
        if (depth_ == 0) return;
        // Implicit continuation inside brackets: skip leading whitespace.
        while (i_ < src_.size() && (src_[i_] == ' ' || src_[i_] == '\t')) ++i_;
        continue;
      }
      if (c == ' ' || c == '\t') {
        ++i_;
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '\\') fail(here(), "line continuation is not supported");
      const Pos pos = here();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t b = i_;
        while (i_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
          ++i_;
        }
        std::string word(src_.substr(b, i_ - b));
        if (is_in(word, kForbidden)) fail(pos, "forbidden construct '" + word + "'");
        const Tok kind = is_in(word, kKeywords) ? Tok::Keyword : Tok::Name;
        emit(kind, std::move(word), pos);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t b = i_;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        if (i_ < src_.size() && (src_[i_] == '.' && i_ + 1 < src_.size() &&
                                 std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
          fail(pos, "floating-point literals are not supported");
        }
        if (i_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
          fail(pos, "invalid numeric literal");
        }
        emit(Tok::Int, std::string(src_.substr(b, i_ - b)), pos);
        continue;
      }
      if (c == '"' || c == '\'') {
        string_literal(pos);
        continue;
      }
      op(pos);
    }
  }

  void string_literal(Pos pos) {
    const char quote = src_[i_];
    if (src_.substr(i_, 3) == std::string(3, quote)) fail(pos, "triple-quoted strings are not supported");
    ++i_;
    std::string value;
    while (true) {
      if (i_ >= src_.size() || src_[i_] == '\n') fail(pos, "unterminated string literal");
      const char c = src_[i_++];
      if (c == quote) break;
      if (c != '\\') {
        value.push_back(c);
        continue;
      }
      if (i_ >= src_.size()) fail(pos, "unterminated string literal");
      const char e = src_[i_++];
      switch (e) {
        case 'n': value.push_back('\n'); break;
        case 't': value.push_back('\t'); break;
        case '\\': value.push_back('\\'); break;
        case '"': value.push_back('"'); break;
        case '\'': value.push_back('\''); break;
        default: fail(Pos{line_, static_cast<int>(i_ - line_begin_) - 1}, std::string("unsupported escape '\\") + e + "'");
      }
    }
    emit(Tok::String, std::move(value), pos);
  }

  void op(Pos pos) {
    static constexpr std::array kTwo = {"==", "!=", "<=", ">=", "//"};
    static constexpr std::array kBad2 = {"**", "+=", "-=", "*=", "/=", "->", ":="};
    const auto two = src_.substr(i_, 2);
    if (two.size() == 2) {
      if (is_in(two, kBad2)) fail(pos, "unsupported operator '" + std::string(two) + "'");
      if (is_in(two, kTwo)) {
        if (two == "//" && src_.substr(i_, 3) == "//=") fail(pos, "unsupported operator '//='");
        emit(Tok::Op, std::string(two), pos);
        i_ += 2;
        return;
      }
    }
    const char c = src_[i_];
    static constexpr std::string_view kSingle = "()[]{},:.=<>+-*";
    if (kSingle.find(c) == std::string_view::npos) {
      fail(pos, std::string("unsupported character '") + c + "'");
    }
    if (c == '(' || c == '[' || c == '{') ++depth_;
    if (c == ')' || c == ']' || c == '}') {
      if (depth_ == 0) fail(pos, std::string("unmatched '") + c + "'");
      --depth_;
    }
    emit(Tok::Op, std::string(1, c), pos);
    ++i_;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  std::size_t line_begin_ = 0;
  int line_ = 1;
  int depth_ = 0;
  std::vector<int> indents_;
  std::vector<Token> out_;
};

}  // namespace

std::vector<Token> lex(std::string_view source) { return Lexer(source).run(); }

}  // namespace proviq::lang::detail
