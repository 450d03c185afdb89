// Accumulator loops rewritten as list, dict and set comprehensions.

#include "common.hpp"

namespace pyidiom::detail {
namespace {

constexpr std::initializer_list<NodeKind> kIterWrap = {NodeKind::IfExp, NodeKind::Lambda, NodeKind::NamedExpr,
                                                       NodeKind::Yield, NodeKind::Starred};

bool is_empty_init(IdiomKind kind, const SyntaxNode& value, std::string_view src) {
  switch (kind) {
    case IdiomKind::ListComp:
      return value.kind == NodeKind::List && value.children.size() == 2;
    case IdiomKind::DictComp:
      return value.kind == NodeKind::Dict && value.children.size() == 2;
    case IdiomKind::SetComp:
      return value.kind == NodeKind::Call && value.children.size() == 3 &&
             value.children[0].kind == NodeKind::Name &&
             src.substr(value.children[0].span.start, value.children[0].span.size()) == "set";
    default:
      return false;
  }
}

// `acc.method(ARG)` with one plain positional argument; returns ARG.
const SyntaxNode* method_call_arg(const SyntaxNode& stmt, std::string_view acc, std::string_view method,
                                  std::string_view src) {
  if (stmt.kind != NodeKind::ExprStmt) return nullptr;
  const SyntaxNode& call = stmt.children.front();
  if (call.kind != NodeKind::Call) return nullptr;
  const SyntaxNode& func = call.children.front();
  if (func.kind != NodeKind::Attribute || func.children.size() != 3) return nullptr;
  const SyntaxNode& recv = func.children[0];
  if (recv.kind != NodeKind::Name || src.substr(recv.span.start, recv.span.size()) != acc) return nullptr;
  if (src.substr(func.children[2].span.start, func.children[2].span.size()) != method) return nullptr;
  const auto args = node_children(call);
  if (args.size() != 2) return nullptr;  // func + one argument
  const SyntaxNode& arg = *args[1];
  if (arg.kind != NodeKind::Argument || arg.children.size() != 1 || arg.children.front().is_token()) return nullptr;
  const SyntaxNode& expr = arg.children.front();
  if (expr.kind == NodeKind::Starred) return nullptr;
  // A bare generator argument `f(x for x in y)` has no parentheses of its own.
  if (expr.kind == NodeKind::GeneratorExp && !expr.children.front().is_token("(", src)) return nullptr;
  return &expr;
}

struct LoopBody {
  const SyntaxNode* stmt = nullptr;  // the accumulating statement
  const SyntaxNode* cond = nullptr;  // optional filter
  bool single = false;
};

LoopBody loop_body(const SyntaxNode& loop) {
  LoopBody out;
  const SyntaxNode* suite = body_suite(loop);
  if (!suite) return out;
  const auto items = node_children(*suite);
  if (items.size() != 1) return out;
  const SyntaxNode& item = *items.front();
  if (item.kind == NodeKind::If) {
    if (has_clause(item, NodeKind::ElifClause) || has_clause(item, NodeKind::ElseClause)) return out;
    const SyntaxNode* inner = body_suite(item);
    const auto inner_items = node_children(*inner);
    if (inner_items.size() != 1) return out;
    out.stmt = sole_statement(*inner_items.front());
    out.cond = &item.children[1];
  } else {
    out.stmt = sole_statement(item);
  }
  out.single = out.stmt != nullptr;
  return out;
}

}  // namespace

std::vector<SiteRewrite> comprehension_sites(IdiomKind kind, const SourceUnit& unit, SafetyFacts& facts,
                                             const EngineOptions&) {
  const std::string_view src = unit.text();
  std::vector<SiteRewrite> out;
  const bool set_shadowed = kind == IdiomKind::SetComp && name_rebound(unit, "set");
  for (const Block& block : collect_blocks(unit)) {
    for (std::size_t i = 0; i + 1 < block.items.size(); ++i) {
      const AssignParts init = name_assign(*block.items[i]);
      if (!init || !is_empty_init(kind, *init.value, src)) continue;
      const SyntaxNode& loop = *block.items[i + 1];
      if (loop.kind != NodeKind::For) continue;
      const std::string_view acc = unit.text_of(*init.target);
      const LoopBody body = loop_body(loop);
      if (!body.single) continue;

      // Match the accumulating statement; anything else is not a candidate.
      const SyntaxNode* expr = nullptr;
      const SyntaxNode* key = nullptr;
      const SyntaxNode* value = nullptr;
      if (kind == IdiomKind::ListComp) {
        expr = method_call_arg(*body.stmt, acc, "append", src);
        if (!expr) continue;
      } else if (kind == IdiomKind::SetComp) {
        expr = method_call_arg(*body.stmt, acc, "add", src);
        if (!expr) continue;
      } else {
        const AssignParts store = single_assign(*body.stmt);
        if (!store || store.target->kind != NodeKind::Subscript) continue;
        const SyntaxNode& sub = *store.target;
        if (sub.children.size() != 4 || sub.children[0].kind != NodeKind::Name ||
            unit.text_of(sub.children[0]) != acc) {
          continue;
        }
        key = &sub.children[2];
        if (key->kind == NodeKind::Slice || contains_kind(*key, {NodeKind::Slice})) continue;
        value = store.value;
      }

      const SyntaxNode* target = child_after(loop, "for", src);
      const SyntaxNode* iter = child_after(loop, "in", src);
      const Span region = full_lines(unit, loop.span);
      SiteBuilder site(unit, kind, Span{block.items[i]->span.start, loop.span.end});
      site.bind("accumulator", acc).bind("target", unit.text_of(*target)).bind("iterable", unit.text_of(*iter));
      if (expr) site.bind("element", unit.text_of(*expr));
      if (key) site.bind("key", unit.text_of(*key)).bind("value", unit.text_of(*value));
      if (body.cond) site.bind("condition", unit.text_of(*body.cond));

      std::vector<const SyntaxNode*> parts{target, iter};
      for (const SyntaxNode* p : {expr, key, value, body.cond}) {
        if (p) parts.push_back(p);
      }
      bool acc_free = true;
      for (const SyntaxNode* p : parts) acc_free = acc_free && !mentions_name(*p, unit, acc);
      site.guard("synchronous_loop", !loop.children.front().is_token("async", src));
      site.guard("no_loop_else", !has_clause(loop, NodeKind::ElseClause));
      site.guard("accumulator_not_used_in_loop", acc_free);

      bool plain_target = true;
      walk(*target, [&](const SyntaxNode& n) {
        if (n.kind == NodeKind::Attribute || n.kind == NodeKind::Subscript || n.kind == NodeKind::Starred) {
          plain_target = false;
        }
      });
      site.guard("plain_loop_target", plain_target);
      bool target_local = true;
      for (const auto& occ : name_occurrences(*target, unit)) {
        if (facts.escapes(occ.name, loop.span)) target_local = false;
      }
      site.guard("loop_target_not_used_after", target_local);

      bool no_special = true;
      for (const SyntaxNode* p : parts) {
        if (p != iter && contains_kind(*p, {NodeKind::NamedExpr, NodeKind::Yield, NodeKind::Await})) no_special = false;
      }
      if (contains_kind(*iter, {NodeKind::NamedExpr, NodeKind::Yield})) no_special = false;
      site.guard("no_walrus_yield_await", no_special);
      site.guard("not_class_body", !in_class_body(unit, block));
      site.guard("not_inside_try", !inside_try(unit, loop));

      // Effects in the element or filter may observe the accumulator only
      // if it is visible outside the function.
      bool effects_pure = true;
      for (const SyntaxNode* p : {expr, key, value, body.cond}) {
        if (p && facts.purity(*p) != Purity::Pure) effects_pure = false;
      }
      const SyntaxNode* fn = enclosing_function(loop.span, unit);
      bool acc_captured = false;
      if (fn) {
        for (const auto& occ : name_occurrences(fn->children.back(), unit)) {
          if (occ.name == acc && (occ.nested_scope || occ.declaration)) acc_captured = true;
        }
      }
      site.guard("effects_cannot_observe_accumulator", effects_pure || (fn && !acc_captured));
      if (kind == IdiomKind::DictComp) {
        const int impure = (facts.purity(*key) != Purity::Pure) + (facts.purity(*value) != Purity::Pure);
        site.guard("key_value_order_irrelevant", impure <= 1);
      }
      if (kind == IdiomKind::SetComp) site.guard("set_builtin_not_shadowed", !set_shadowed);
      site.guard("no_comments_in_loop", !has_comment(unit, region));

      if (site.passed()) {
        std::string comp;
        const std::string tail = " for " + std::string(unit.text_of(*target)) + " in " +
                                 operand_text(unit, *iter, kIterWrap) +
                                 (body.cond ? " if " + operand_text(unit, *body.cond, kIterWrap) : "");
        if (kind == IdiomKind::ListComp) {
          comp = "[" + operand_text(unit, *expr, {NodeKind::Yield}) + tail + "]";
        } else if (kind == IdiomKind::SetComp) {
          comp = "{" + operand_text(unit, *expr, {NodeKind::Yield}) + tail + "}";
        } else {
          comp = "{" + operand_text(unit, *key, {NodeKind::Lambda, NodeKind::Yield}) + ": " +
                 operand_text(unit, *value, {NodeKind::Lambda, NodeKind::Yield}) + tail + "}";
        }
        site.edit(init.value->span, comp);
        site.edit(region, "");
      }
      out.push_back(site.finish());
    }
  }
  return out;
}

}  // namespace pyidiom::detail
