#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pyidiom/syntax.hpp"

namespace pyidiom::detail {

struct Token {
  TokenType type;
  Span span;
  Span trivia;
};

struct TokenStream {
  std::vector<Token> tokens;
  IndentStyle indent;
};

/// Splits source into tokens; INDENT/DEDENT/NEWLINE follow the CPython
/// tokenizer except that DEDENTs are placed at the end of the block they
/// close (so block spans do not swallow trailing comments).
TokenStream tokenize(std::string_view text, const LineIndex& lines);

bool is_keyword(std::string_view word);

}  // namespace pyidiom::detail
