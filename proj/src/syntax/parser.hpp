#pragma once

#include <string_view>

#include "tokenizer.hpp"

namespace pyidiom::detail {

/// Builds the lossless tree for a token stream. Every token, including
/// NEWLINE/INDENT/DEDENT/ENDMARKER, becomes a leaf exactly once.
SyntaxNode parse_tokens(std::string_view text, const LineIndex& lines, const std::vector<Token>& tokens);

}  // namespace pyidiom::detail
