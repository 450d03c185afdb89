#include "parser.hpp"

#include <initializer_list>
#include <optional>
#include <string>
#include <utility>

namespace pyidiom::detail {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const LineIndex& lines, const std::vector<Token>& tokens)
      : text_(text), lines_(lines), tokens_(tokens) {}

  SyntaxNode file_input() {
    std::vector<SyntaxNode> children;
    while (type() != TokenType::EndMarker) {
      if (type() == TokenType::Indent) fail("unexpected indent");
      if (type() == TokenType::Dedent || type() == TokenType::Newline) fail("invalid syntax");
      children.push_back(statement());
    }
    children.push_back(take());
    return make(NodeKind::Module, std::move(children));
  }

 private:
  // --- token access ---------------------------------------------------

  const Token& cur() const { return tokens_[idx_]; }
  const Token& ahead(std::size_t n) const {
    const std::size_t i = idx_ + n;
    return tokens_[i < tokens_.size() ? i : tokens_.size() - 1];
  }
  TokenType type() const { return cur().type; }
  std::string_view text_of(const Token& tok) const { return text_.substr(tok.span.start, tok.span.size()); }

  static bool punct_or_keyword(const Token& tok) {
    return tok.type == TokenType::Op || tok.type == TokenType::Keyword;
  }
  bool at(std::string_view s) const { return punct_or_keyword(cur()) && text_of(cur()) == s; }
  bool at_any(std::initializer_list<std::string_view> options) const {
    for (auto s : options) {
      if (at(s)) return true;
    }
    return false;
  }
  bool ahead_is(std::size_t n, std::string_view s) const {
    return punct_or_keyword(ahead(n)) && text_of(ahead(n)) == s;
  }

  [[noreturn]] void fail(const std::string& message) const { fail_at(cur().span.start, message); }
  [[noreturn]] void fail_at(std::size_t offset, const std::string& message) const {
    const auto lc = lines_.locate(offset);
    throw SyntaxError(offset, lc.line, lc.column, message);
  }

  SyntaxNode take() {
    const Token& tok = cur();
    SyntaxNode leaf;
    leaf.kind = NodeKind::Token;
    leaf.span = tok.span;
    leaf.token_type = tok.type;
    leaf.trivia = tok.trivia;
    if (tok.type != TokenType::EndMarker) ++idx_;
    return leaf;
  }

  SyntaxNode expect(std::string_view s) {
    if (!at(s)) {
      if (type() == TokenType::Newline || type() == TokenType::EndMarker) {
        fail("expected '" + std::string(s) + "'");
      }
      fail("invalid syntax: expected '" + std::string(s) + "', found '" + std::string(text_of(cur())) + "'");
    }
    return take();
  }

  SyntaxNode expect_type(TokenType t, const char* what) {
    if (type() != t) fail(std::string("expected ") + what);
    return take();
  }

  static SyntaxNode make(NodeKind kind, std::vector<SyntaxNode> children) {
    SyntaxNode node;
    node.kind = kind;
    node.span = Span{children.front().span.start, children.back().span.end};
    node.children = std::move(children);
    return node;
  }

  bool at_statement_end() const {
    return type() == TokenType::Newline || type() == TokenType::EndMarker || at(";");
  }

  bool starts_expression() const {
    switch (type()) {
      case TokenType::Name:
      case TokenType::Number:
      case TokenType::String:
        return true;
      case TokenType::Keyword:
        return at_any({"None", "True", "False", "not", "lambda", "await", "yield"});
      case TokenType::Op:
        return at_any({"(", "[", "{", "-", "+", "~", "*", "..."});
      default:
        return false;
    }
  }

  // --- statements -------------------------------------------------------

  SyntaxNode statement() {
    if (type() == TokenType::Name && text_of(cur()) == "match") {
      if (auto m = try_match_stmt()) return std::move(*m);
    }
    if (at_any({"if", "while", "for", "try", "with", "def", "class", "@"})) return compound();
    if (at("async") && (ahead_is(1, "def") || ahead_is(1, "for") || ahead_is(1, "with"))) return compound();
    return simple_line();
  }

  SyntaxNode compound() {
    if (at("if")) return if_stmt();
    if (at("while")) return while_stmt();
    if (at("try")) return try_stmt();
    if (at("@")) return decorated();
    if (at("class")) return class_def();
    if (at("def")) return func_def({});
    std::vector<SyntaxNode> prefix;
    if (at("async")) prefix.push_back(take());
    if (at("def")) return func_def(std::move(prefix));
    if (at("for")) return for_stmt(std::move(prefix));
    return with_stmt(std::move(prefix));
  }

  // `match` is a soft keyword: the statement is attempted first and the
  // line is re-read as an ordinary statement when that fails.
  std::optional<SyntaxNode> try_match_stmt() {
    const std::size_t saved = idx_;
    try {
      std::vector<SyntaxNode> children;
      children.push_back(take());
      if (!starts_expression()) throw SyntaxError(0, 0, 0, "not a match statement");
      children.push_back(testlist_star_expr());
      children.push_back(expect(":"));
      children.push_back(expect_type(TokenType::Newline, "newline"));
      children.push_back(expect_type(TokenType::Indent, "indented case block"));
      do {
        if (!(type() == TokenType::Name && text_of(cur()) == "case")) fail("expected 'case'");
        children.push_back(case_clause());
      } while (type() != TokenType::Dedent);
      children.push_back(take());
      return make(NodeKind::Match, std::move(children));
    } catch (const SyntaxError&) {
      idx_ = saved;
      in_pattern_ = false;
      return std::nullopt;
    }
  }

  SyntaxNode case_clause() {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    in_pattern_ = true;
    children.push_back(comma_list([this] { return maybe_as(at("*") ? star_expr() : expr()); }));
    in_pattern_ = false;
    if (at("if")) {
      children.push_back(take());
      children.push_back(namedexpr_test());
    }
    append_block(children);
    return make(NodeKind::CaseClause, std::move(children));
  }

  SyntaxNode maybe_as(SyntaxNode pattern) {
    if (!in_pattern_ || !at("as")) return pattern;
    std::vector<SyntaxNode> children;
    children.push_back(std::move(pattern));
    children.push_back(take());
    children.push_back(name_expr());
    return make(NodeKind::MatchAs, std::move(children));
  }

  SyntaxNode simple_line() {
    std::vector<SyntaxNode> children;
    children.push_back(small_stmt());
    while (at(";")) {
      children.push_back(take());
      if (type() == TokenType::Newline) break;
      children.push_back(small_stmt());
    }
    if (type() != TokenType::Newline) fail("invalid syntax");
    children.push_back(take());
    return make(NodeKind::SimpleLine, std::move(children));
  }

  SyntaxNode suite() {
    std::vector<SyntaxNode> children;
    if (type() != TokenType::Newline) {
      children.push_back(simple_line());
      return make(NodeKind::Suite, std::move(children));
    }
    children.push_back(take());
    if (type() != TokenType::Indent) fail("expected an indented block");
    children.push_back(take());
    while (type() != TokenType::Dedent) {
      if (type() == TokenType::EndMarker) fail("unexpected EOF in block");
      if (type() == TokenType::Indent) fail("unexpected indent");
      children.push_back(statement());
    }
    children.push_back(take());
    return make(NodeKind::Suite, std::move(children));
  }

  void append_block(std::vector<SyntaxNode>& children) {
    children.push_back(expect(":"));
    children.push_back(suite());
  }

  std::optional<SyntaxNode> else_clause() {
    if (!at("else")) return std::nullopt;
    std::vector<SyntaxNode> children;
    children.push_back(take());
    append_block(children);
    return make(NodeKind::ElseClause, std::move(children));
  }

  SyntaxNode if_stmt() {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    children.push_back(namedexpr_test());
    append_block(children);
    while (at("elif")) {
      std::vector<SyntaxNode> clause;
      clause.push_back(take());
      clause.push_back(namedexpr_test());
      append_block(clause);
      children.push_back(make(NodeKind::ElifClause, std::move(clause)));
    }
    if (auto e = else_clause()) children.push_back(std::move(*e));
    return make(NodeKind::If, std::move(children));
  }

  SyntaxNode while_stmt() {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    children.push_back(namedexpr_test());
    append_block(children);
    if (auto e = else_clause()) children.push_back(std::move(*e));
    return make(NodeKind::While, std::move(children));
  }

  SyntaxNode for_stmt(std::vector<SyntaxNode> children) {
    children.push_back(expect("for"));
    SyntaxNode target = target_list();
    validate_target(target, false);
    children.push_back(std::move(target));
    children.push_back(expect("in"));
    children.push_back(testlist_star_expr());
    append_block(children);
    if (auto e = else_clause()) children.push_back(std::move(*e));
    return make(NodeKind::For, std::move(children));
  }

  SyntaxNode try_stmt() {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    append_block(children);
    bool handlers = false;
    while (at("except")) {
      handlers = true;
      std::vector<SyntaxNode> clause;
      clause.push_back(take());
      if (!at(":")) {
        clause.push_back(test());
        if (at("as")) {
          clause.push_back(take());
          clause.push_back(name_expr());
        }
      }
      append_block(clause);
      children.push_back(make(NodeKind::ExceptClause, std::move(clause)));
    }
    if (handlers) {
      if (auto e = else_clause()) children.push_back(std::move(*e));
    }
    if (at("finally")) {
      std::vector<SyntaxNode> clause;
      clause.push_back(take());
      append_block(clause);
      children.push_back(make(NodeKind::FinallyClause, std::move(clause)));
    } else if (!handlers) {
      fail("expected 'except' or 'finally' block");
    }
    return make(NodeKind::Try, std::move(children));
  }

  SyntaxNode with_item() {
    std::vector<SyntaxNode> children;
    children.push_back(test());
    if (at("as")) {
      children.push_back(take());
      SyntaxNode target = expr();
      validate_target(target, false);
      children.push_back(std::move(target));
    }
    return make(NodeKind::WithItem, std::move(children));
  }

  SyntaxNode with_stmt(std::vector<SyntaxNode> children) {
    children.push_back(expect("with"));
    if (at("(")) {
      const std::size_t saved = idx_;
      try {
        std::vector<SyntaxNode> items;
        items.push_back(take());
        items.push_back(with_item());
        while (at(",")) {
          items.push_back(take());
          if (at(")")) break;
          items.push_back(with_item());
        }
        items.push_back(expect(")"));
        if (at(":")) {
          for (auto& item : items) children.push_back(std::move(item));
          append_block(children);
          return make(NodeKind::With, std::move(children));
        }
      } catch (const SyntaxError&) {
      }
      idx_ = saved;
    }
    children.push_back(with_item());
    while (at(",")) {
      children.push_back(take());
      children.push_back(with_item());
    }
    append_block(children);
    return make(NodeKind::With, std::move(children));
  }

  SyntaxNode decorated() {
    std::vector<SyntaxNode> children;
    while (at("@")) {
      std::vector<SyntaxNode> deco;
      deco.push_back(take());
      deco.push_back(namedexpr_test());
      deco.push_back(expect_type(TokenType::Newline, "newline after decorator"));
      children.push_back(make(NodeKind::Decorator, std::move(deco)));
    }
    if (at("class")) {
      children.push_back(class_def());
    } else if (at("def")) {
      children.push_back(func_def({}));
    } else if (at("async") && ahead_is(1, "def")) {
      std::vector<SyntaxNode> prefix;
      prefix.push_back(take());
      children.push_back(func_def(std::move(prefix)));
    } else {
      fail("expected function or class definition after decorator");
    }
    return make(NodeKind::Decorated, std::move(children));
  }

  SyntaxNode func_def(std::vector<SyntaxNode> children) {
    children.push_back(expect("def"));
    children.push_back(expect_type(TokenType::Name, "function name"));
    children.push_back(parameters(true));
    if (at("->")) {
      children.push_back(take());
      children.push_back(test());
    }
    append_block(children);
    return make(NodeKind::FunctionDef, std::move(children));
  }

  SyntaxNode class_def() {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    children.push_back(expect_type(TokenType::Name, "class name"));
    if (at("(")) {
      children.push_back(take());
      arguments(children);
      children.push_back(expect(")"));
    }
    append_block(children);
    return make(NodeKind::ClassDef, std::move(children));
  }

  // Function parameters when `parenthesized`, lambda parameters otherwise.
  SyntaxNode parameters(bool parenthesized) {
    std::vector<SyntaxNode> children;
    const std::string_view close = parenthesized ? ")" : ":";
    if (parenthesized) children.push_back(expect("("));
    bool seen_default = false;
    bool seen_star = false;
    while (!at(close)) {
      std::vector<SyntaxNode> param;
      if (at("/")) {
        param.push_back(take());
      } else if (at("*") || at("**")) {
        const bool single = at("*");
        seen_star = true;
        param.push_back(take());
        if (!single || type() == TokenType::Name) {
          param.push_back(expect_type(TokenType::Name, "parameter name"));
          if (parenthesized && at(":")) {
            param.push_back(take());
            param.push_back(test());
          }
        }
      } else {
        param.push_back(expect_type(TokenType::Name, "parameter name"));
        if (parenthesized && at(":")) {
          param.push_back(take());
          param.push_back(test());
        }
        if (at("=")) {
          seen_default = true;
          param.push_back(take());
          param.push_back(test());
        } else if (seen_default && !seen_star) {
          fail_at(param.front().span.start, "non-default argument follows default argument");
        }
      }
      children.push_back(make(NodeKind::Param, std::move(param)));
      if (!at(",")) break;
      children.push_back(take());
    }
    if (parenthesized) {
      children.push_back(expect(")"));
    } else if (children.empty()) {
      // `lambda: x` has no parameters; an empty node cannot carry a span.
      return SyntaxNode{NodeKind::Parameters, Span{cur().span.start, cur().span.start}, {}, TokenType::Op, {}};
    }
    return make(NodeKind::Parameters, std::move(children));
  }

  SyntaxNode small_stmt() {
    if (at("pass")) return single(NodeKind::Pass);
    if (at("break")) return single(NodeKind::Break);
    if (at("continue")) return single(NodeKind::Continue);
    if (at("return")) {
      std::vector<SyntaxNode> children;
      children.push_back(take());
      if (!at_statement_end()) children.push_back(testlist_star_expr());
      return make(NodeKind::Return, std::move(children));
    }
    if (at("raise")) {
      std::vector<SyntaxNode> children;
      children.push_back(take());
      if (!at_statement_end()) {
        children.push_back(test());
        if (at("from")) {
          children.push_back(take());
          children.push_back(test());
        }
      }
      return make(NodeKind::Raise, std::move(children));
    }
    if (at("global") || at("nonlocal")) {
      const NodeKind kind = at("global") ? NodeKind::Global : NodeKind::Nonlocal;
      std::vector<SyntaxNode> children;
      children.push_back(take());
      children.push_back(name_expr());
      while (at(",")) {
        children.push_back(take());
        children.push_back(name_expr());
      }
      return make(kind, std::move(children));
    }
    if (at("del")) {
      std::vector<SyntaxNode> children;
      children.push_back(take());
      SyntaxNode targets = target_list();
      validate_target(targets, false);
      children.push_back(std::move(targets));
      return make(NodeKind::Del, std::move(children));
    }
    if (at("import")) return import_name();
    if (at("from")) return import_from();
    if (at("assert")) {
      std::vector<SyntaxNode> children;
      children.push_back(take());
      children.push_back(test());
      if (at(",")) {
        children.push_back(take());
        children.push_back(test());
      }
      return make(NodeKind::Assert, std::move(children));
    }
    return expression_statement();
  }

  SyntaxNode single(NodeKind kind) {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    return make(kind, std::move(children));
  }

  void dotted_name(std::vector<SyntaxNode>& out) {
    out.push_back(expect_type(TokenType::Name, "module name"));
    while (at(".")) {
      out.push_back(take());
      out.push_back(expect_type(TokenType::Name, "module name"));
    }
  }

  SyntaxNode import_name() {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    while (true) {
      dotted_name(children);
      if (at("as")) {
        children.push_back(take());
        children.push_back(expect_type(TokenType::Name, "alias"));
      }
      if (!at(",")) break;
      children.push_back(take());
    }
    return make(NodeKind::Import, std::move(children));
  }

  SyntaxNode import_from() {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    bool relative = false;
    while (at(".") || at("...")) {
      relative = true;
      children.push_back(take());
    }
    if (!at("import")) {
      dotted_name(children);
    } else if (!relative) {
      fail("expected module name");
    }
    children.push_back(expect("import"));
    if (at("*")) {
      children.push_back(take());
    } else {
      const bool paren = at("(");
      if (paren) children.push_back(take());
      while (true) {
        children.push_back(expect_type(TokenType::Name, "imported name"));
        if (at("as")) {
          children.push_back(take());
          children.push_back(expect_type(TokenType::Name, "alias"));
        }
        if (!at(",")) break;
        children.push_back(take());
        if (paren && at(")")) break;
      }
      if (paren) children.push_back(expect(")"));
    }
    return make(NodeKind::ImportFrom, std::move(children));
  }

  SyntaxNode expression_statement() {
    SyntaxNode first = at("yield") ? yield_expr() : testlist_star_expr();
    if (at_any({"+=", "-=", "*=", "/=", "//=", "%=", "@=", "&=", "|=", "^=", ">>=", "<<=", "**="})) {
      if (first.kind != NodeKind::Name && first.kind != NodeKind::Attribute && first.kind != NodeKind::Subscript) {
        fail_at(first.span.start, "illegal expression for augmented assignment");
      }
      std::vector<SyntaxNode> children;
      children.push_back(std::move(first));
      children.push_back(take());
      children.push_back(at("yield") ? yield_expr() : testlist_star_expr());
      return make(NodeKind::AugAssign, std::move(children));
    }
    if (at(":")) {
      if (first.kind != NodeKind::Name && first.kind != NodeKind::Attribute && first.kind != NodeKind::Subscript &&
          first.kind != NodeKind::Paren) {
        fail_at(first.span.start, "illegal target for annotation");
      }
      std::vector<SyntaxNode> children;
      children.push_back(std::move(first));
      children.push_back(take());
      children.push_back(test());
      if (at("=")) {
        children.push_back(take());
        children.push_back(at("yield") ? yield_expr() : testlist_star_expr());
      }
      return make(NodeKind::AnnAssign, std::move(children));
    }
    if (at("=")) {
      std::vector<SyntaxNode> children;
      children.push_back(std::move(first));
      while (at("=")) {
        validate_target(children.back(), false);
        children.push_back(take());
        children.push_back(at("yield") ? yield_expr() : testlist_star_expr());
      }
      return make(NodeKind::Assign, std::move(children));
    }
    std::vector<SyntaxNode> children;
    children.push_back(std::move(first));
    return make(NodeKind::ExprStmt, std::move(children));
  }

  void validate_target(const SyntaxNode& node, bool nested_star) {
    switch (node.kind) {
      case NodeKind::Name:
      case NodeKind::Attribute:
      case NodeKind::Subscript:
        return;
      case NodeKind::Starred:
        if (nested_star) fail_at(node.span.start, "multiple starred expressions in assignment");
        validate_target(node.children[1], true);
        return;
      case NodeKind::Paren:
        validate_target(node.children[1], nested_star);
        return;
      case NodeKind::Tuple:
      case NodeKind::List:
        for (const auto& child : node.children) {
          if (!child.is_token()) validate_target(child, false);
        }
        return;
      default:
        fail_at(node.span.start, "cannot assign to " + std::string(to_string(node.kind)));
    }
  }

  // --- expressions ------------------------------------------------------

  SyntaxNode name_expr() {
    std::vector<SyntaxNode> children;
    children.push_back(expect_type(TokenType::Name, "name"));
    return make(NodeKind::Name, std::move(children));
  }

  SyntaxNode yield_expr() {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    if (at("from")) {
      children.push_back(take());
      children.push_back(test());
    } else if (starts_expression() && !at("yield")) {
      children.push_back(testlist_star_expr());
    }
    return make(NodeKind::Yield, std::move(children));
  }

  SyntaxNode test_or_star() { return at("*") ? star_expr() : test(); }
  SyntaxNode namedexpr_or_star() { return maybe_as(at("*") ? star_expr() : namedexpr_test()); }

  SyntaxNode star_expr() {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    children.push_back(expr());
    return make(NodeKind::Starred, std::move(children));
  }

  // Comma-separated list that becomes an unparenthesized Tuple when a comma
  // is present.
  template <typename ElementFn>
  SyntaxNode comma_list(ElementFn element) {
    SyntaxNode first = element();
    if (!at(",")) return first;
    std::vector<SyntaxNode> children;
    children.push_back(std::move(first));
    while (at(",")) {
      children.push_back(take());
      if (!starts_expression()) break;
      children.push_back(element());
    }
    return make(NodeKind::Tuple, std::move(children));
  }

  SyntaxNode no_bare_star(SyntaxNode node) {
    if (node.kind == NodeKind::Starred) fail_at(node.span.start, "can't use starred expression here");
    return node;
  }

  SyntaxNode testlist_star_expr() {
    return no_bare_star(comma_list([this] { return test_or_star(); }));
  }

  SyntaxNode target_list() {
    return no_bare_star(comma_list([this] { return at("*") ? star_expr() : expr(); }));
  }

  SyntaxNode namedexpr_test() {
    SyntaxNode first = test();
    if (!at(":=")) return first;
    if (first.kind != NodeKind::Name) fail_at(first.span.start, "cannot use assignment expressions with this target");
    std::vector<SyntaxNode> children;
    children.push_back(std::move(first));
    children.push_back(take());
    children.push_back(test());
    return make(NodeKind::NamedExpr, std::move(children));
  }

  SyntaxNode test() {
    if (at("lambda")) return lambda(false);
    SyntaxNode body = or_test();
    if (!at("if")) return body;
    std::vector<SyntaxNode> children;
    children.push_back(std::move(body));
    children.push_back(take());
    children.push_back(or_test());
    children.push_back(expect("else"));
    children.push_back(test());
    return make(NodeKind::IfExp, std::move(children));
  }

  SyntaxNode test_nocond() { return at("lambda") ? lambda(true) : or_test(); }

  SyntaxNode lambda(bool nocond) {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    children.push_back(parameters(false));
    children.push_back(expect(":"));
    children.push_back(nocond ? test_nocond() : test());
    // Drop an empty parameter placeholder so child spans stay ordered.
    if (children[1].children.empty()) children.erase(children.begin() + 1);
    return make(NodeKind::Lambda, std::move(children));
  }

  SyntaxNode bool_chain(std::string_view op, SyntaxNode (Parser::*next)()) {
    SyntaxNode first = (this->*next)();
    if (!at(op)) return first;
    std::vector<SyntaxNode> children;
    children.push_back(std::move(first));
    while (at(op)) {
      children.push_back(take());
      children.push_back((this->*next)());
    }
    return make(NodeKind::BoolOp, std::move(children));
  }

  SyntaxNode or_test() { return bool_chain("or", &Parser::and_test); }
  SyntaxNode and_test() { return bool_chain("and", &Parser::not_test); }

  SyntaxNode not_test() {
    if (!at("not")) return comparison();
    std::vector<SyntaxNode> children;
    children.push_back(take());
    children.push_back(not_test());
    return make(NodeKind::UnaryOp, std::move(children));
  }

  bool at_comp_op() const {
    return at_any({"<", ">", "==", ">=", "<=", "!=", "in", "is"}) || (at("not") && ahead_is(1, "in"));
  }

  SyntaxNode comparison() {
    SyntaxNode first = expr();
    if (!at_comp_op()) return first;
    std::vector<SyntaxNode> children;
    children.push_back(std::move(first));
    while (at_comp_op()) {
      if (at("not")) {
        children.push_back(take());
        children.push_back(take());
      } else if (at("is")) {
        children.push_back(take());
        if (at("not")) children.push_back(take());
      } else {
        children.push_back(take());
      }
      children.push_back(expr());
    }
    return make(NodeKind::Compare, std::move(children));
  }

  SyntaxNode binary(std::initializer_list<std::string_view> ops, SyntaxNode (Parser::*next)()) {
    SyntaxNode left = (this->*next)();
    while (at_any(ops)) {
      std::vector<SyntaxNode> children;
      children.push_back(std::move(left));
      children.push_back(take());
      children.push_back((this->*next)());
      left = make(NodeKind::BinOp, std::move(children));
    }
    return left;
  }

  SyntaxNode expr() { return binary({"|"}, &Parser::xor_expr); }
  SyntaxNode xor_expr() { return binary({"^"}, &Parser::and_expr); }
  SyntaxNode and_expr() { return binary({"&"}, &Parser::shift_expr); }
  SyntaxNode shift_expr() { return binary({"<<", ">>"}, &Parser::arith_expr); }
  SyntaxNode arith_expr() { return binary({"+", "-"}, &Parser::term); }
  SyntaxNode term() { return binary({"*", "/", "%", "//", "@"}, &Parser::factor); }

  SyntaxNode factor() {
    if (!at_any({"+", "-", "~"})) return power();
    std::vector<SyntaxNode> children;
    children.push_back(take());
    children.push_back(factor());
    return make(NodeKind::UnaryOp, std::move(children));
  }

  SyntaxNode power() {
    SyntaxNode base = await_primary();
    if (!at("**")) return base;
    std::vector<SyntaxNode> children;
    children.push_back(std::move(base));
    children.push_back(take());
    children.push_back(factor());
    return make(NodeKind::BinOp, std::move(children));
  }

  SyntaxNode await_primary() {
    if (!at("await")) return primary();
    std::vector<SyntaxNode> children;
    children.push_back(take());
    children.push_back(primary());
    return make(NodeKind::Await, std::move(children));
  }

  SyntaxNode primary() {
    SyntaxNode node = atom();
    while (true) {
      std::vector<SyntaxNode> children;
      if (at("(")) {
        children.push_back(std::move(node));
        children.push_back(take());
        arguments(children);
        children.push_back(expect(")"));
        node = make(NodeKind::Call, std::move(children));
      } else if (at("[")) {
        children.push_back(std::move(node));
        children.push_back(take());
        children.push_back(subscript_list());
        children.push_back(expect("]"));
        node = make(NodeKind::Subscript, std::move(children));
      } else if (at(".")) {
        children.push_back(std::move(node));
        children.push_back(take());
        children.push_back(expect_type(TokenType::Name, "attribute name"));
        node = make(NodeKind::Attribute, std::move(children));
      } else {
        return node;
      }
    }
  }

  void arguments(std::vector<SyntaxNode>& out) {
    bool seen_keyword = false;
    bool seen_double_star = false;
    while (!at(")")) {
      std::vector<SyntaxNode> arg;
      if (at("*") || at("**")) {
        if (at("*") && seen_double_star) fail("iterable argument unpacking follows keyword argument unpacking");
        seen_double_star |= at("**");
        arg.push_back(take());
        arg.push_back(test());
      } else {
        const std::size_t arg_start = cur().span.start;
        SyntaxNode value = test();
        const bool positional = !at("=");
        if (positional && (seen_keyword || seen_double_star) && !in_pattern_) {
          fail_at(arg_start, seen_double_star ? "positional argument follows keyword argument unpacking"
                                              : "positional argument follows keyword argument");
        }
        if (at("=")) {
          seen_keyword = true;
          if (value.kind != NodeKind::Name) fail_at(value.span.start, "expression cannot contain assignment");
          arg.push_back(std::move(value));
          arg.push_back(take());
          arg.push_back(maybe_as(test()));
        } else if (at(":=")) {
          if (value.kind != NodeKind::Name) fail_at(value.span.start, "cannot use assignment expressions with this target");
          std::vector<SyntaxNode> named;
          named.push_back(std::move(value));
          named.push_back(take());
          named.push_back(test());
          arg.push_back(make(NodeKind::NamedExpr, std::move(named)));
        } else if (at_comp_for()) {
          std::vector<SyntaxNode> gen;
          gen.push_back(std::move(value));
          comp_clauses(gen);
          arg.push_back(make(NodeKind::GeneratorExp, std::move(gen)));
        } else {
          arg.push_back(maybe_as(std::move(value)));
        }
      }
      out.push_back(make(NodeKind::Argument, std::move(arg)));
      if (!at(",")) break;
      out.push_back(take());
    }
  }

  SyntaxNode subscript_list() {
    SyntaxNode first = subscript();
    if (!at(",")) return first;
    std::vector<SyntaxNode> children;
    children.push_back(std::move(first));
    while (at(",")) {
      children.push_back(take());
      if (at("]")) break;
      children.push_back(subscript());
    }
    return make(NodeKind::Tuple, std::move(children));
  }

  SyntaxNode subscript() {
    std::vector<SyntaxNode> children;
    if (!at(":")) {
      SyntaxNode lower = at("*") ? star_expr() : namedexpr_test();
      if (!at(":")) return lower;
      children.push_back(std::move(lower));
    }
    children.push_back(take());
    if (!at_any({":", "]", ","})) children.push_back(test());
    if (at(":")) {
      children.push_back(take());
      if (!at_any({"]", ","})) children.push_back(test());
    }
    return make(NodeKind::Slice, std::move(children));
  }

  bool at_comp_for() const { return at("for") || (at("async") && ahead_is(1, "for")); }

  void comp_clauses(std::vector<SyntaxNode>& out) {
    while (at_comp_for()) {
      std::vector<SyntaxNode> clause;
      if (at("async")) clause.push_back(take());
      clause.push_back(expect("for"));
      SyntaxNode target = target_list();
      validate_target(target, false);
      clause.push_back(std::move(target));
      clause.push_back(expect("in"));
      clause.push_back(or_test());
      out.push_back(make(NodeKind::CompFor, std::move(clause)));
      while (at("if")) {
        std::vector<SyntaxNode> cond;
        cond.push_back(take());
        cond.push_back(test_nocond());
        out.push_back(make(NodeKind::CompIf, std::move(cond)));
      }
    }
  }

  SyntaxNode atom() {
    std::vector<SyntaxNode> children;
    switch (type()) {
      case TokenType::Name:
        children.push_back(take());
        return make(NodeKind::Name, std::move(children));
      case TokenType::Number:
        children.push_back(take());
        return make(NodeKind::Constant, std::move(children));
      case TokenType::String: {
        bool formatted = false;
        while (type() == TokenType::String) {
          const std::string_view lit = text_of(cur());
          for (char c : lit) {
            if (c == '"' || c == '\'') break;
            if (c == 'f' || c == 'F') formatted = true;
          }
          children.push_back(take());
        }
        return make(formatted ? NodeKind::FormattedString : NodeKind::String, std::move(children));
      }
      default:
        break;
    }
    if (at_any({"None", "True", "False", "..."})) {
      children.push_back(take());
      return make(NodeKind::Constant, std::move(children));
    }
    if (at("(")) return paren_atom();
    if (at("[")) return list_atom();
    if (at("{")) return brace_atom();
    if (type() == TokenType::Newline || type() == TokenType::EndMarker) fail("invalid syntax: unexpected end of line");
    fail("invalid syntax: unexpected '" + std::string(text_of(cur())) + "'");
  }

  SyntaxNode paren_atom() {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    if (at(")")) {
      children.push_back(take());
      return make(NodeKind::Tuple, std::move(children));
    }
    if (at("yield")) {
      children.push_back(yield_expr());
      children.push_back(expect(")"));
      return make(NodeKind::Paren, std::move(children));
    }
    children.push_back(namedexpr_or_star());
    if (at_comp_for()) {
      comp_clauses(children);
      children.push_back(expect(")"));
      return make(NodeKind::GeneratorExp, std::move(children));
    }
    if (!at(",")) {
      children.push_back(expect(")"));
      return make(NodeKind::Paren, std::move(children));
    }
    while (at(",")) {
      children.push_back(take());
      if (at(")")) break;
      children.push_back(namedexpr_or_star());
    }
    children.push_back(expect(")"));
    return make(NodeKind::Tuple, std::move(children));
  }

  SyntaxNode list_atom() {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    if (at("]")) {
      children.push_back(take());
      return make(NodeKind::List, std::move(children));
    }
    children.push_back(namedexpr_or_star());
    if (at_comp_for()) {
      comp_clauses(children);
      children.push_back(expect("]"));
      return make(NodeKind::ListComp, std::move(children));
    }
    while (at(",")) {
      children.push_back(take());
      if (at("]")) break;
      children.push_back(namedexpr_or_star());
    }
    children.push_back(expect("]"));
    return make(NodeKind::List, std::move(children));
  }

  SyntaxNode dict_entry() {
    std::vector<SyntaxNode> children;
    if (at("**")) {
      children.push_back(take());
      children.push_back(expr());
    } else {
      children.push_back(test());
      children.push_back(expect(":"));
      children.push_back(maybe_as(test()));
    }
    return make(NodeKind::DictEntry, std::move(children));
  }

  SyntaxNode brace_atom() {
    std::vector<SyntaxNode> children;
    children.push_back(take());
    if (at("}")) {
      children.push_back(take());
      return make(NodeKind::Dict, std::move(children));
    }
    bool is_dict = at("**");
    SyntaxNode first;
    if (is_dict) {
      first = dict_entry();
    } else {
      SyntaxNode key = namedexpr_or_star();
      if (at(":") && key.kind != NodeKind::Starred) {
        is_dict = true;
        std::vector<SyntaxNode> entry;
        entry.push_back(std::move(key));
        entry.push_back(take());
        entry.push_back(maybe_as(test()));
        first = make(NodeKind::DictEntry, std::move(entry));
      } else {
        first = std::move(key);
      }
    }
    const bool unpacking = first.kind == NodeKind::DictEntry && first.children.size() == 2;
    children.push_back(std::move(first));
    if (at_comp_for() && !unpacking) {
      comp_clauses(children);
      children.push_back(expect("}"));
      return make(is_dict ? NodeKind::DictComp : NodeKind::SetComp, std::move(children));
    }
    while (at(",")) {
      children.push_back(take());
      if (at("}")) break;
      children.push_back(is_dict ? dict_entry() : namedexpr_or_star());
    }
    children.push_back(expect("}"));
    return make(is_dict ? NodeKind::Dict : NodeKind::Set, std::move(children));
  }

  std::string_view text_;
  const LineIndex& lines_;
  const std::vector<Token>& tokens_;
  std::size_t idx_ = 0;
  bool in_pattern_ = false;
};

}  // namespace

SyntaxNode parse_tokens(std::string_view text, const LineIndex& lines, const std::vector<Token>& tokens) {
  return Parser(text, lines, tokens).file_input();
}

}  // namespace pyidiom::detail
