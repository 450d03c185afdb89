#include "tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace pyidiom::detail {
namespace {

constexpr std::array kKeywords = {
    "False", "None",   "True",    "and",      "as",     "assert", "async", "await",
    "break", "class",  "continue", "def",     "del",    "elif",   "else",  "except",
    "finally", "for",  "from",    "global",   "if",     "import", "in",    "is",
    "lambda", "nonlocal", "not",  "or",       "pass",   "raise",  "return", "try",
    "while", "with",   "yield",
};

// Longest first within each length class.
constexpr std::array kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "!=", "%=", "&=", "**", "*=", "+=", "-=", "->", "//",
    "/=",  ":=",  "<<",  "<=",  "==",  ">=", ">>", "@=", "^=", "|=", "%", "&", "(", ")",
    "*",   "+",   ",",   "-",   ".",   "/",  ":",  ";",  "<",  "=",  ">", "@", "[", "]",
    "^",   "{",   "|",   "}",   "~",
};

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_string_prefix(std::string_view word) {
  if (word.size() > 2) return false;
  std::string lower;
  for (char c : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  static constexpr std::array kPrefixes = {"r", "u", "b", "f", "br", "rb", "fr", "rf"};
  return std::find(kPrefixes.begin(), kPrefixes.end(), lower) != kPrefixes.end();
}

class Lexer {
 public:
  Lexer(std::string_view text, const LineIndex& lines) : text_(text), lines_(lines) {}

  TokenStream run() {
    while (true) {
      if (at_line_start_ && depth_ == 0) {
        if (!begin_logical_line()) break;
      }
      skip_intraline_trivia();
      if (pos_ >= text_.size()) break;
      const unsigned char c = static_cast<unsigned char>(text_[pos_]);
      if (c == '\n' || c == '\r') {
        const std::size_t len = (c == '\r' && peek(1) == '\n') ? 2 : 1;
        if (depth_ > 0) {
          pos_ += len;
        } else {
          emit(TokenType::Newline, pos_, pos_ + len);
          at_line_start_ = true;
        }
        continue;
      }
      if (is_ident_start(c)) {
        lex_name_or_prefixed_string();
      } else if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        lex_number();
      } else if (c == '"' || c == '\'') {
        lex_string(pos_);
      } else {
        lex_operator();
      }
    }
    if (depth_ > 0) fail(openers_.back(), "'" + std::string(text_.substr(openers_.back(), 1)) + "' was never closed");
    if (!stream_.tokens.empty() && stream_.tokens.back().type != TokenType::Newline) {
      emit(TokenType::Newline, text_.size(), text_.size());
    }
    const std::size_t dedent_at = stream_.tokens.empty() ? 0 : stream_.tokens.back().span.end;
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenType::Dedent, dedent_at, dedent_at);
    }
    emit(TokenType::EndMarker, text_.size(), text_.size());
    stream_.indent.mixed = saw_tab_indent_ && saw_space_indent_;
    return std::move(stream_);
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  [[noreturn]] void fail(std::size_t offset, const std::string& message) const {
    const auto lc = lines_.locate(offset);
    throw SyntaxError(offset, lc.line, lc.column, message);
  }

  void emit(TokenType type, std::size_t start, std::size_t end) {
    stream_.tokens.push_back(Token{type, Span{start, end}, Span{last_end_, start}});
    last_end_ = end;
  }

  // Handles indentation at the start of a logical line; returns false at EOF.
  bool begin_logical_line() {
    while (pos_ < text_.size()) {
      const std::size_t line_begin = pos_;
      std::size_t col = 0;
      bool tab = false;
      bool space = false;
      while (pos_ < text_.size()) {
        const char c = text_[pos_];
        if (c == ' ') {
          ++col;
          space = true;
        } else if (c == '\t') {
          col = (col / 8 + 1) * 8;
          tab = true;
        } else if (c == '\f') {
          col = 0;
        } else {
          break;
        }
        ++pos_;
      }
      if (pos_ >= text_.size()) return false;
      const char c = text_[pos_];
      if (c == '#' || c == '\n' || c == '\r') {
        skip_comment();
        skip_newline();
        continue;
      }
      if (c == '\\' && (peek(1) == '\n' || peek(1) == '\r')) {
        // Explicit join onto a blank-prefixed line: indentation of the
        // continued line does not count.
        pos_ = line_begin;
        at_line_start_ = false;
        return true;
      }
      saw_tab_indent_ |= tab;
      saw_space_indent_ |= space;
      const std::string_view indent_text = text_.substr(line_begin, pos_ - line_begin);
      if (col > indents_.back().column) {
        if (!first_indent_seen_) {
          first_indent_seen_ = true;
          const std::string& outer = indents_.back().text;
          stream_.indent.unit = std::string(
              indent_text.substr(0, outer.size()) == outer ? indent_text.substr(outer.size()) : indent_text);
        }
        indents_.push_back(Level{col, std::string(indent_text)});
        emit(TokenType::Indent, pos_, pos_);
      } else if (col < indents_.back().column) {
        const std::size_t dedent_at = last_end_;
        while (col < indents_.back().column) {
          indents_.pop_back();
          stream_.tokens.push_back(Token{TokenType::Dedent, Span{dedent_at, dedent_at}, Span{dedent_at, dedent_at}});
        }
        if (col != indents_.back().column) fail(pos_, "unindent does not match any outer indentation level");
      }
      at_line_start_ = false;
      return true;
    }
    return false;
  }

  void skip_comment() {
    if (pos_ < text_.size() && text_[pos_] == '#') {
      while (pos_ < text_.size() && text_[pos_] != '\n' && text_[pos_] != '\r') ++pos_;
    }
  }

  void skip_newline() {
    if (pos_ < text_.size() && text_[pos_] == '\r') ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
  }

  void skip_intraline_trivia() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\f') {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else if (c == '\\') {
        if (peek(1) == '\n' || peek(1) == '\r') {
          ++pos_;
          skip_newline();
          if (pos_ >= text_.size()) fail(pos_, "unexpected EOF after line continuation");
        } else {
          fail(pos_, "unexpected character after line continuation character");
        }
      } else {
        break;
      }
    }
  }

  void lex_name_or_prefixed_string() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view word = text_.substr(start, pos_ - start);
    if (pos_ < text_.size() && (text_[pos_] == '"' || text_[pos_] == '\'') && is_string_prefix(word)) {
      lex_string(start);
      return;
    }
    emit(is_keyword(word) ? TokenType::Keyword : TokenType::Name, start, pos_);
  }

  void lex_string(std::size_t start) {
    const char quote = text_[pos_];
    const bool triple = peek(1) == quote && peek(2) == quote;
    pos_ += triple ? 3 : 1;
    while (true) {
      if (pos_ >= text_.size()) {
        fail(start, triple ? "unterminated triple-quoted string literal" : "unterminated string literal");
      }
      const char c = text_[pos_];
      if (c == '\\') {
        pos_ += 2;
        if (pos_ > text_.size()) pos_ = text_.size();
        if (text_[pos_ - 1] == '\r' && peek(0) == '\n') ++pos_;
        continue;
      }
      if (!triple && (c == '\n' || c == '\r')) fail(start, "unterminated string literal");
      if (c == quote) {
        if (!triple) {
          ++pos_;
          break;
        }
        if (peek(1) == quote && peek(2) == quote) {
          pos_ += 3;
          break;
        }
      }
      ++pos_;
    }
    emit(TokenType::String, start, pos_);
  }

  void lex_number() {
    const std::size_t start = pos_;
    auto digits = [&](auto pred) {
      while (pos_ < text_.size() && (pred(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    };
    auto dec = [](unsigned char c) { return std::isdigit(c) != 0; };
    const char next = static_cast<char>(std::tolower(static_cast<unsigned char>(peek(1))));
    if (text_[pos_] == '0' && (next == 'x' || next == 'o' || next == 'b')) {
      pos_ += 2;
      digits([](unsigned char c) { return std::isxdigit(c) != 0; });
    } else {
      digits(dec);
      if (pos_ < text_.size() && text_[pos_] == '.') {
        ++pos_;
        digits(dec);
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        const char sign = peek(1);
        const std::size_t digit_at = (sign == '+' || sign == '-') ? 2 : 1;
        if (std::isdigit(static_cast<unsigned char>(peek(digit_at)))) {
          pos_ += digit_at;
          digits(dec);
        }
      }
      if (pos_ < text_.size() && (text_[pos_] == 'j' || text_[pos_] == 'J')) ++pos_;
    }
    emit(TokenType::Number, start, pos_);
  }

  void lex_operator() {
    for (std::string_view op : kOperators) {
      if (text_.substr(pos_, op.size()) == op) {
        const std::size_t start = pos_;
        pos_ += op.size();
        if (op == "(" || op == "[" || op == "{") {
          ++depth_;
          openers_.push_back(start);
        } else if (op == ")" || op == "]" || op == "}") {
          if (depth_ == 0) fail(start, "unmatched '" + std::string(op) + "'");
          --depth_;
          openers_.pop_back();
        }
        emit(TokenType::Op, start, pos_);
        return;
      }
    }
    fail(pos_, "invalid character in source");
  }

  struct Level {
    std::size_t column;
    std::string text;
  };

  std::string_view text_;
  const LineIndex& lines_;
  std::size_t pos_ = 0;
  std::size_t last_end_ = 0;
  int depth_ = 0;
  std::vector<std::size_t> openers_;
  bool at_line_start_ = true;
  bool first_indent_seen_ = false;
  bool saw_tab_indent_ = false;
  bool saw_space_indent_ = false;
  std::vector<Level> indents_{Level{0, ""}};
  TokenStream stream_;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

TokenStream tokenize(std::string_view text, const LineIndex& lines) {
  return Lexer(text, lines).run();
}

}  // namespace pyidiom::detail
