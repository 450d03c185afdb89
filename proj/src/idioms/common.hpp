#pragma once

// Helpers shared by the idiom detectors.

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "pyidiom/idioms.hpp"

namespace pyidiom::detail {

/// A statement sequence: the items of a module or an indented suite.
struct Block {
  const SyntaxNode* owner = nullptr;  // Module or Suite
  std::vector<const SyntaxNode*> items;
};

std::vector<Block> collect_blocks(const SourceUnit& unit);

/// The lone small statement of a SimpleLine, or nullptr.
const SyntaxNode* sole_statement(const SyntaxNode& item);

/// Single-target assignment: {target, value}, or {nullptr, nullptr}.
struct AssignParts {
  const SyntaxNode* target = nullptr;
  const SyntaxNode* value = nullptr;
  explicit operator bool() const { return target != nullptr; }
};
AssignParts single_assign(const SyntaxNode& stmt);
/// As above but requires the target to be a plain name.
AssignParts name_assign(const SyntaxNode& item);

/// Child following the token `text` among node's direct children.
const SyntaxNode* child_after(const SyntaxNode& node, std::string_view text, std::string_view src);
const SyntaxNode* find_token(const SyntaxNode& node, std::string_view text, std::string_view src);
const SyntaxNode* find_child(const SyntaxNode& node, NodeKind kind);

/// Strips any number of redundant parentheses.
const SyntaxNode& unparen(const SyntaxNode& node);

/// Token texts of a subtree; used for textual identity ignoring spacing.
std::vector<std::string_view> token_texts(const SyntaxNode& node, std::string_view src);
bool same_tokens(const SyntaxNode& a, const SyntaxNode& b, std::string_view src);

/// Whether a '#' comment lies inside `span`.
bool has_comment(const SourceUnit& unit, const Span& span);

bool contains_kind(const SyntaxNode& node, std::initializer_list<NodeKind> kinds);

/// Source text of `node`, parenthesized if its kind is in `wrap_kinds`
/// or it is a tuple without its own parentheses.
std::string operand_text(const SourceUnit& unit, const SyntaxNode& node, std::initializer_list<NodeKind> wrap_kinds);
bool is_bare_tuple(const SyntaxNode& node, std::string_view src);

bool mentions_name(const SyntaxNode& node, const SourceUnit& unit, std::string_view name);
/// Whether `name` is rebound anywhere in the unit (shadowing a builtin).
bool name_rebound(const SourceUnit& unit, std::string_view name);

/// Whether `node` lies inside a try statement of its own function.
bool inside_try(const SourceUnit& unit, const SyntaxNode& node);
/// Whether the block is the body of a class.
bool in_class_body(const SourceUnit& unit, const Block& block);

bool is_integer_literal(const SyntaxNode& node, std::string_view src);
/// Value of a non-negative decimal integer literal, or -1.
long integer_value(const SyntaxNode& node, std::string_view src);

/// The suite body of a compound statement (its last Suite child).
const SyntaxNode* body_suite(const SyntaxNode& node);
bool has_clause(const SyntaxNode& node, NodeKind clause);

/// Site construction helpers.
class SiteBuilder {
 public:
  SiteBuilder(const SourceUnit& unit, IdiomKind kind, Span span);

  SiteBuilder& bind(std::string key, std::string_view value);
  SiteBuilder& guard(std::string name, bool ok);
  SiteBuilder& guard(std::string name, GuardOutcome outcome);
  SiteBuilder& edit(Span span, std::string replacement);

  bool passed() const { return site_.passed(); }
  SiteRewrite finish();

 private:
  const SourceUnit& unit_;
  DetectionSite site_;
  std::vector<TextEdit> edits_;
};

GuardOutcome purity_guard(Purity p);

std::vector<SiteRewrite> comprehension_sites(IdiomKind kind, const SourceUnit& unit, SafetyFacts& facts,
                                             const EngineOptions& options);
std::vector<SiteRewrite> for_multi_target_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options);
std::vector<SiteRewrite> loop_else_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options);
std::vector<SiteRewrite> chain_comparison_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options);
std::vector<SiteRewrite> truth_value_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options);
std::vector<SiteRewrite> star_call_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options);
std::vector<SiteRewrite> fstring_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options);
std::vector<SiteRewrite> assign_multi_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options);
std::vector<SiteRewrite> chain_assign_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options);
std::vector<SiteRewrite> with_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options);

}  // namespace pyidiom::detail
