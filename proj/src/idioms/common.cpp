#include "common.hpp"

#include <algorithm>
#include <cctype>

namespace pyidiom::detail {

std::vector<Block> collect_blocks(const SourceUnit& unit) {
  std::vector<Block> blocks;
  walk(unit.tree(), [&](const SyntaxNode& n) {
    if (n.kind == NodeKind::Module || n.kind == NodeKind::Suite) blocks.push_back(Block{&n, node_children(n)});
  });
  return blocks;
}

const SyntaxNode* sole_statement(const SyntaxNode& item) {
  if (item.kind != NodeKind::SimpleLine) return nullptr;
  const auto parts = node_children(item);
  return parts.size() == 1 ? parts.front() : nullptr;
}

AssignParts single_assign(const SyntaxNode& stmt) {
  const SyntaxNode* node = &stmt;
  if (node->kind == NodeKind::SimpleLine) {
    node = sole_statement(*node);
    if (!node) return {};
  }
  if (node->kind != NodeKind::Assign) return {};
  const auto parts = node_children(*node);
  if (parts.size() != 2) return {};
  return AssignParts{parts[0], parts[1]};
}

AssignParts name_assign(const SyntaxNode& item) {
  AssignParts parts = single_assign(item);
  if (!parts || parts.target->kind != NodeKind::Name) return {};
  return parts;
}

const SyntaxNode* child_after(const SyntaxNode& node, std::string_view text, std::string_view src) {
  for (std::size_t i = 0; i + 1 < node.children.size(); ++i) {
    if (node.children[i].is_token(text, src) && !node.children[i + 1].is_token()) return &node.children[i + 1];
  }
  return nullptr;
}

const SyntaxNode* find_token(const SyntaxNode& node, std::string_view text, std::string_view src) {
  for (const auto& child : node.children) {
    if (child.is_token(text, src)) return &child;
  }
  return nullptr;
}

const SyntaxNode* find_child(const SyntaxNode& node, NodeKind kind) {
  for (const auto& child : node.children) {
    if (child.kind == kind) return &child;
  }
  return nullptr;
}

const SyntaxNode& unparen(const SyntaxNode& node) {
  const SyntaxNode* cur = &node;
  while (cur->kind == NodeKind::Paren) cur = &cur->children[1];
  return *cur;
}

std::vector<std::string_view> token_texts(const SyntaxNode& node, std::string_view src) {
  std::vector<std::string_view> out;
  walk(node, [&](const SyntaxNode& n) {
    if (n.is_token()) out.push_back(src.substr(n.span.start, n.span.size()));
  });
  return out;
}

bool same_tokens(const SyntaxNode& a, const SyntaxNode& b, std::string_view src) {
  return token_texts(a, src) == token_texts(b, src);
}

bool has_comment(const SourceUnit& unit, const Span& span) {
  const std::string_view text = unit.text();
  for (const SyntaxNode* tok : unit.tokens()) {
    if (tok->trivia.start >= span.end) break;
    const std::size_t lo = std::max(tok->trivia.start, span.start);
    const std::size_t hi = std::min(tok->trivia.end, span.end);
    if (lo < hi && text.substr(lo, hi - lo).find('#') != std::string_view::npos) return true;
  }
  return false;
}

bool contains_kind(const SyntaxNode& node, std::initializer_list<NodeKind> kinds) {
  bool found = false;
  walk(node, [&](const SyntaxNode& n) {
    if (std::find(kinds.begin(), kinds.end(), n.kind) != kinds.end()) found = true;
  });
  return found;
}

bool is_bare_tuple(const SyntaxNode& node, std::string_view src) {
  return node.kind == NodeKind::Tuple && !(node.children.size() >= 2 && node.children.front().is_token("(", src));
}

std::string operand_text(const SourceUnit& unit, const SyntaxNode& node, std::initializer_list<NodeKind> wrap_kinds) {
  const std::string text(unit.text_of(node));
  const bool wrap = is_bare_tuple(node, unit.text()) ||
                    std::find(wrap_kinds.begin(), wrap_kinds.end(), node.kind) != wrap_kinds.end();
  return wrap ? "(" + text + ")" : text;
}

bool mentions_name(const SyntaxNode& node, const SourceUnit& unit, std::string_view name) {
  for (const auto& occ : name_occurrences(node, unit)) {
    if (occ.name == name) return true;
  }
  return false;
}

bool name_rebound(const SourceUnit& unit, std::string_view name) {
  bool rebound = false;
  walk(unit.tree(), [&](const SyntaxNode& n) {
    if (rebound) return;
    if (n.kind == NodeKind::FunctionDef || n.kind == NodeKind::ClassDef || n.kind == NodeKind::Lambda) {
      // Parameters and nested definitions can shadow too.
      walk(n, [&](const SyntaxNode& t) {
        if (t.is_token() && t.token_type == TokenType::Name && unit.text_of(t) == name) {
          const SyntaxNode* parent = unit.parent(t);
          if (parent && (parent->kind == NodeKind::Param || parent == &n)) rebound = true;
        }
      });
    }
  });
  if (rebound) return true;
  for (const auto& occ : name_occurrences(unit.tree(), unit)) {
    if (occ.name == name && (occ.write || occ.declaration)) return true;
  }
  // Writes inside nested scopes are not reported as writes above.
  walk(unit.tree(), [&](const SyntaxNode& n) {
    if (rebound || !(n.kind == NodeKind::FunctionDef || n.kind == NodeKind::ClassDef)) return;
    for (const auto& occ : name_occurrences(n.children.back(), unit)) {
      if (occ.name == name && (occ.write || occ.declaration)) rebound = true;
    }
  });
  return rebound;
}

bool inside_try(const SourceUnit& unit, const SyntaxNode& node) {
  for (const SyntaxNode* cur = unit.parent(node); cur; cur = unit.parent(*cur)) {
    if (cur->kind == NodeKind::Try) return true;
    if (cur->kind == NodeKind::FunctionDef || cur->kind == NodeKind::ClassDef || cur->kind == NodeKind::Lambda) {
      return false;
    }
  }
  return false;
}

bool in_class_body(const SourceUnit& unit, const Block& block) {
  if (block.owner->kind != NodeKind::Suite) return false;
  const SyntaxNode* parent = unit.parent(*block.owner);
  return parent && parent->kind == NodeKind::ClassDef;
}

long integer_value(const SyntaxNode& node, std::string_view src) {
  if (node.kind != NodeKind::Constant) return -1;
  const SyntaxNode* tok = first_token(node);
  if (!tok || tok->token_type != TokenType::Number) return -1;
  const std::string_view text = src.substr(tok->span.start, tok->span.size());
  if (text.empty() || text.size() > 9) return -1;
  if (!std::all_of(text.begin(), text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return -1;
  }
  if (text.size() > 1 && text.front() == '0') return -1;
  return std::stol(std::string(text));
}

bool is_integer_literal(const SyntaxNode& node, std::string_view src) {
  if (node.kind != NodeKind::Constant) return false;
  const SyntaxNode* tok = first_token(node);
  if (!tok || tok->token_type != TokenType::Number) return false;
  const std::string_view text = src.substr(tok->span.start, tok->span.size());
  const bool hex_like = text.size() > 1 && text[0] == '0' && std::isalpha(static_cast<unsigned char>(text[1]));
  if (hex_like) return true;
  return text.find_first_of(".eEjJ") == std::string_view::npos;
}

const SyntaxNode* body_suite(const SyntaxNode& node) {
  const SyntaxNode* suite = nullptr;
  for (const auto& child : node.children) {
    if (child.kind == NodeKind::Suite) suite = &child;
  }
  return suite;
}

bool has_clause(const SyntaxNode& node, NodeKind clause) { return find_child(node, clause) != nullptr; }

GuardOutcome purity_guard(Purity p) {
  switch (p) {
    case Purity::Pure: return GuardOutcome::Pass;
    case Purity::Impure: return GuardOutcome::Fail;
    case Purity::Unknown: return GuardOutcome::Unknown;
  }
  return GuardOutcome::Unknown;
}

SiteBuilder::SiteBuilder(const SourceUnit& unit, IdiomKind kind, Span span) : unit_(unit) {
  site_.idiom = kind;
  site_.span = span;
  site_.line = unit.line_index().locate(span.start).line;
}

SiteBuilder& SiteBuilder::bind(std::string key, std::string_view value) {
  site_.bindings[std::move(key)] = std::string(value);
  return *this;
}

SiteBuilder& SiteBuilder::guard(std::string name, bool ok) {
  return guard(std::move(name), ok ? GuardOutcome::Pass : GuardOutcome::Fail);
}

SiteBuilder& SiteBuilder::guard(std::string name, GuardOutcome outcome) {
  site_.guards.push_back(GuardResult{std::move(name), outcome});
  return *this;
}

SiteBuilder& SiteBuilder::edit(Span span, std::string replacement) {
  edits_.push_back(TextEdit{span, std::move(replacement)});
  return *this;
}

SiteRewrite SiteBuilder::finish() {
  SiteRewrite out;
  out.site = site_;
  out.plan.provenance = Provenance{std::string(idiom_info(site_.idiom).tag), site_.span, site_.line};
  if (site_.passed()) {
    std::sort(edits_.begin(), edits_.end(),
              [](const TextEdit& a, const TextEdit& b) { return a.span.start < b.span.start; });
    out.plan.edits = std::move(edits_);
  }
  return out;
}

}  // namespace pyidiom::detail
