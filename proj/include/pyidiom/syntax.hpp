#pragma once

// Lossless Python 3 syntax tree.
//
// Every byte of the source is owned either by a token leaf or by the
// leading trivia (whitespace, comments, line continuations) in front of a
// token, so concatenating trivia + token text over all leaves reproduces
// the input exactly. Rewrites operate on byte spans of this tree and never
// pretty-print.

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pyidiom {

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool empty() const { return start == end; }
  bool contains(const Span& other) const { return start <= other.start && other.end <= end; }
  bool overlaps(const Span& other) const { return start < other.end && other.start < end; }
  friend bool operator==(const Span&, const Span&) = default;
};

enum class TokenType {
  Name,
  Keyword,
  Number,
  String,
  Op,
  Newline,
  Indent,
  Dedent,
  EndMarker,
};

/// Grammar tag set. Statement kinds first, then expressions, then clause
/// and helper kinds. `Token` marks a leaf.
enum class NodeKind {
  Module,
  // compound statements
  FunctionDef,
  ClassDef,
  Decorated,
  If,
  For,
  While,
  With,
  Try,
  Match,
  // clauses of compound statements
  ElifClause,
  ElseClause,
  ExceptClause,
  FinallyClause,
  CaseClause,
  WithItem,
  Suite,
  Decorator,
  Parameters,
  Param,
  // simple statements
  SimpleLine,
  ExprStmt,
  Assign,
  AugAssign,
  AnnAssign,
  Return,
  Pass,
  Break,
  Continue,
  Raise,
  Global,
  Nonlocal,
  Del,
  Import,
  ImportFrom,
  Assert,
  // expressions
  Name,
  Constant,
  String,
  FormattedString,
  Tuple,
  List,
  Dict,
  Set,
  ListComp,
  SetComp,
  DictComp,
  GeneratorExp,
  Paren,
  Call,
  Argument,
  Subscript,
  Slice,
  Attribute,
  Compare,
  BoolOp,
  BinOp,
  UnaryOp,
  IfExp,
  Lambda,
  NamedExpr,
  Starred,
  Await,
  Yield,
  DictEntry,
  CompFor,
  CompIf,
  MatchAs,
  Token,
};

std::string_view to_string(NodeKind kind);
std::string_view to_string(TokenType type);

struct SyntaxNode {
  NodeKind kind = NodeKind::Token;
  Span span;
  std::vector<SyntaxNode> children;
  // Leaf-only fields.
  TokenType token_type = TokenType::Op;
  Span trivia;  // text between the previous token and this one

  bool is_token() const { return kind == NodeKind::Token; }
  bool is_token(std::string_view text, std::string_view source) const;
  bool is_expression() const;
  bool is_statement() const;
};

/// Thrown by parse() for input that is not valid Python 3 grammar.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t offset, std::size_t line, std::size_t column, const std::string& message);

  std::size_t offset() const { return offset_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t offset_;
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

class OutOfBounds : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct LineColumn {
  std::size_t line = 1;    // 1-based
  std::size_t column = 0;  // 0-based byte column
};

class LineIndex {
 public:
  LineIndex() = default;
  explicit LineIndex(std::string_view text);

  LineColumn locate(std::size_t offset) const;
  std::size_t line_start(std::size_t offset) const;
  std::size_t line_count() const { return starts_.size(); }

 private:
  std::vector<std::size_t> starts_{0};
};

/// Indentation used to wrap blocks: the increment of the first indented
/// block in the file, four spaces when the file has none.
struct IndentStyle {
  std::string unit = "    ";
  bool mixed = false;  // both tabs and spaces lead some line
};

class SourceUnit;

/// Parses Python 3.8+ source. Throws SyntaxError on invalid input.
SourceUnit parse(std::string text, std::string origin = "<input>");

/// An immutable parsed source file. Copies share the underlying data, so a
/// SourceUnit may be handed to concurrent readers freely.
class SourceUnit {
 public:
  const std::string& origin() const { return data_->origin; }
  const std::string& text() const { return data_->text; }
  const SyntaxNode& tree() const { return data_->root; }
  const LineIndex& line_index() const { return data_->lines; }
  const IndentStyle& indent() const { return data_->indent; }

  /// Parent of `node` in this unit's tree, or nullptr for the root.
  const SyntaxNode* parent(const SyntaxNode& node) const;

  std::string_view slice(const Span& span) const;
  std::string_view text_of(const SyntaxNode& node) const { return slice(node.span); }

  /// Leaves in document order.
  const std::vector<const SyntaxNode*>& tokens() const { return data_->tokens; }

 private:
  friend SourceUnit parse(std::string text, std::string origin);

  struct Data {
    std::string origin;
    std::string text;
    SyntaxNode root;
    LineIndex lines;
    IndentStyle indent;
    std::vector<const SyntaxNode*> tokens;
    std::unordered_map<const SyntaxNode*, const SyntaxNode*> parents;
  };
  std::shared_ptr<const Data> data_;
};

/// All nodes of `kind` in document (pre-)order.
std::vector<const SyntaxNode*> find_nodes(const SourceUnit& unit, NodeKind kind);
std::vector<const SyntaxNode*> find_nodes(const SyntaxNode& root, NodeKind kind);

/// Exact substring of the original text. Throws OutOfBounds.
std::string_view slice_text(const SourceUnit& unit, const Span& span);

/// Concatenates trivia and token text over all leaves.
std::string serialize(const SourceUnit& unit);

/// Structural dump (kinds and spans), one node per line. Used for
/// determinism checks and debugging.
std::string dump_tree(const SyntaxNode& root);

// --- tree helpers -------------------------------------------------------

/// Non-token children, in order.
std::vector<const SyntaxNode*> node_children(const SyntaxNode& node);

/// First token leaf at or under `node`; nullptr when none.
const SyntaxNode* first_token(const SyntaxNode& node);

template <typename Fn>
void walk(const SyntaxNode& node, Fn&& fn) {
  fn(node);
  for (const auto& child : node.children) walk(child, fn);
}

}  // namespace pyidiom
