#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "proviq/ast.hpp"

namespace proviq::lang::detail {

enum class Tok { Name, Keyword, Int, String, Op, Newline, Indent, Dedent, End };

struct Token {
  Tok kind;
  std::string text;  // decoded for strings
  Pos pos;
};

std::vector<Token> lex(std::string_view source);

}  // namespace proviq::lang::detail
