#include <algorithm>
#include <cstdint>
#include <sstream>

#include "parser.hpp"
#include "pyidiom/syntax.hpp"
#include "tokenizer.hpp"

namespace pyidiom {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Module: return "module";
    case NodeKind::FunctionDef: return "function_def";
    case NodeKind::ClassDef: return "class_def";
    case NodeKind::Decorated: return "decorated";
    case NodeKind::If: return "if_stmt";
    case NodeKind::For: return "for_stmt";
    case NodeKind::While: return "while_stmt";
    case NodeKind::With: return "with_stmt";
    case NodeKind::Try: return "try_stmt";
    case NodeKind::Match: return "match_stmt";
    case NodeKind::ElifClause: return "elif_clause";
    case NodeKind::ElseClause: return "else_clause";
    case NodeKind::ExceptClause: return "except_clause";
    case NodeKind::FinallyClause: return "finally_clause";
    case NodeKind::CaseClause: return "case_clause";
    case NodeKind::WithItem: return "with_item";
    case NodeKind::Suite: return "suite";
    case NodeKind::Decorator: return "decorator";
    case NodeKind::Parameters: return "parameters";
    case NodeKind::Param: return "param";
    case NodeKind::SimpleLine: return "simple_line";
    case NodeKind::ExprStmt: return "expr_stmt";
    case NodeKind::Assign: return "assign";
    case NodeKind::AugAssign: return "aug_assign";
    case NodeKind::AnnAssign: return "ann_assign";
    case NodeKind::Return: return "return_stmt";
    case NodeKind::Pass: return "pass_stmt";
    case NodeKind::Break: return "break_stmt";
    case NodeKind::Continue: return "continue_stmt";
    case NodeKind::Raise: return "raise_stmt";
    case NodeKind::Global: return "global_stmt";
    case NodeKind::Nonlocal: return "nonlocal_stmt";
    case NodeKind::Del: return "del_stmt";
    case NodeKind::Import: return "import_stmt";
    case NodeKind::ImportFrom: return "import_from";
    case NodeKind::Assert: return "assert_stmt";
    case NodeKind::Name: return "name";
    case NodeKind::Constant: return "constant";
    case NodeKind::String: return "string";
    case NodeKind::FormattedString: return "formatted_string";
    case NodeKind::Tuple: return "tuple";
    case NodeKind::List: return "list";
    case NodeKind::Dict: return "dict";
    case NodeKind::Set: return "set";
    case NodeKind::ListComp: return "list_comp";
    case NodeKind::SetComp: return "set_comp";
    case NodeKind::DictComp: return "dict_comp";
    case NodeKind::GeneratorExp: return "generator_exp";
    case NodeKind::Paren: return "paren";
    case NodeKind::Call: return "call";
    case NodeKind::Argument: return "argument";
    case NodeKind::Subscript: return "subscript";
    case NodeKind::Slice: return "slice";
    case NodeKind::Attribute: return "attribute";
    case NodeKind::Compare: return "comparison";
    case NodeKind::BoolOp: return "bool_op";
    case NodeKind::BinOp: return "bin_op";
    case NodeKind::UnaryOp: return "unary_op";
    case NodeKind::IfExp: return "if_exp";
    case NodeKind::Lambda: return "lambda";
    case NodeKind::NamedExpr: return "named_expr";
    case NodeKind::Starred: return "starred";
    case NodeKind::Await: return "await";
    case NodeKind::Yield: return "yield";
    case NodeKind::DictEntry: return "dict_entry";
    case NodeKind::CompFor: return "comp_for";
    case NodeKind::CompIf: return "comp_if";
    case NodeKind::MatchAs: return "match_as";
    case NodeKind::Token: return "token";
  }
  return "unknown";
}

std::string_view to_string(TokenType type) {
  switch (type) {
    case TokenType::Name: return "NAME";
    case TokenType::Keyword: return "KEYWORD";
    case TokenType::Number: return "NUMBER";
    case TokenType::String: return "STRING";
    case TokenType::Op: return "OP";
    case TokenType::Newline: return "NEWLINE";
    case TokenType::Indent: return "INDENT";
    case TokenType::Dedent: return "DEDENT";
    case TokenType::EndMarker: return "ENDMARKER";
  }
  return "UNKNOWN";
}

bool SyntaxNode::is_token(std::string_view text, std::string_view source) const {
  return kind == NodeKind::Token && source.substr(span.start, span.size()) == text;
}

bool SyntaxNode::is_expression() const {
  return kind >= NodeKind::Name && kind <= NodeKind::Yield && kind != NodeKind::Argument && kind != NodeKind::Slice;
}

bool SyntaxNode::is_statement() const {
  return (kind >= NodeKind::FunctionDef && kind <= NodeKind::Match) || (kind >= NodeKind::ExprStmt && kind <= NodeKind::Assert);
}

SyntaxError::SyntaxError(std::size_t offset, std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      offset_(offset),
      line_(line),
      column_(column),
      detail_(message) {}

LineIndex::LineIndex(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') {
      starts_.push_back(i + 1);
    } else if (text[i] == '\r' && (i + 1 >= text.size() || text[i + 1] != '\n')) {
      starts_.push_back(i + 1);
    }
  }
}

LineColumn LineIndex::locate(std::size_t offset) const {
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
  const std::size_t line = static_cast<std::size_t>(it - starts_.begin());
  return LineColumn{line, offset - starts_[line - 1]};
}

std::size_t LineIndex::line_start(std::size_t offset) const {
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
  return *(it - 1);
}

namespace {

void index_tree(const SyntaxNode& node, const SyntaxNode* parent, std::vector<const SyntaxNode*>& tokens,
                std::unordered_map<const SyntaxNode*, const SyntaxNode*>& parents) {
  parents.emplace(&node, parent);
  if (node.is_token()) tokens.push_back(&node);
  for (const auto& child : node.children) index_tree(child, &node, tokens, parents);
}

void collect(const SyntaxNode& node, NodeKind kind, std::vector<const SyntaxNode*>& out) {
  if (node.kind == kind) out.push_back(&node);
  for (const auto& child : node.children) collect(child, kind, out);
}

}  // namespace

namespace {

// Offset of the first byte that breaks UTF-8 well-formedness, or npos.
std::size_t invalid_utf8_at(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c >> 5) == 0x6) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c >> 4) == 0xE) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c >> 3) == 0x1E) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > text.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc >> 6) != 0x2) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
    i += len;
  }
  return std::string_view::npos;
}

}  // namespace

SourceUnit parse(std::string text, std::string origin) {
  if (const std::size_t bad = invalid_utf8_at(text); bad != std::string_view::npos) {
    const LineColumn lc = LineIndex(text).locate(bad);
    throw SyntaxError(bad, lc.line, lc.column, "source is not valid UTF-8");
  }
  auto data = std::make_shared<SourceUnit::Data>();
  data->origin = std::move(origin);
  data->text = std::move(text);
  data->lines = LineIndex(data->text);
  auto stream = detail::tokenize(data->text, data->lines);
  data->indent = stream.indent;
  data->root = detail::parse_tokens(data->text, data->lines, stream.tokens);
  index_tree(data->root, nullptr, data->tokens, data->parents);
  SourceUnit unit;
  unit.data_ = std::move(data);
  return unit;
}

const SyntaxNode* SourceUnit::parent(const SyntaxNode& node) const {
  const auto it = data_->parents.find(&node);
  return it == data_->parents.end() ? nullptr : it->second;
}

std::string_view SourceUnit::slice(const Span& span) const { return slice_text(*this, span); }

std::vector<const SyntaxNode*> find_nodes(const SyntaxNode& root, NodeKind kind) {
  std::vector<const SyntaxNode*> out;
  collect(root, kind, out);
  return out;
}

std::vector<const SyntaxNode*> find_nodes(const SourceUnit& unit, NodeKind kind) {
  return find_nodes(unit.tree(), kind);
}

std::string_view slice_text(const SourceUnit& unit, const Span& span) {
  const std::string& text = unit.text();
  if (span.end < span.start || span.end > text.size()) {
    throw OutOfBounds("span [" + std::to_string(span.start) + ", " + std::to_string(span.end) +
                      ") outside text of length " + std::to_string(text.size()));
  }
  return std::string_view(text).substr(span.start, span.size());
}

std::string serialize(const SourceUnit& unit) {
  std::string out;
  out.reserve(unit.text().size());
  const std::string_view text = unit.text();
  for (const SyntaxNode* tok : unit.tokens()) {
    out.append(text.substr(tok->trivia.start, tok->trivia.size()));
    out.append(text.substr(tok->span.start, tok->span.size()));
  }
  return out;
}

std::string dump_tree(const SyntaxNode& root) {
  std::ostringstream out;
  auto rec = [&out](const auto& self, const SyntaxNode& node, int depth) -> void {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << to_string(node.kind);
    if (node.is_token()) out << ':' << to_string(node.token_type);
    out << " [" << node.span.start << ',' << node.span.end << ")\n";
    for (const auto& child : node.children) self(self, child, depth + 1);
  };
  rec(rec, root, 0);
  return out.str();
}

std::vector<const SyntaxNode*> node_children(const SyntaxNode& node) {
  std::vector<const SyntaxNode*> out;
  for (const auto& child : node.children) {
    if (!child.is_token()) out.push_back(&child);
  }
  return out;
}

const SyntaxNode* first_token(const SyntaxNode& node) {
  if (node.is_token()) return &node;
  for (const auto& child : node.children) {
    if (const auto* tok = first_token(child)) return tok;
  }
  return nullptr;
}

}  // namespace pyidiom
