// Loop-shaped idioms: unpacking loop targets and flag-driven loop else.

#include <set>

#include "common.hpp"

namespace pyidiom::detail {
namespace {

// Element arity of ITER when it is provable: displays of equal-length
// tuples, zip(...) with plain arguments, enumerate(...) and .items().
std::optional<std::size_t> known_arity(const SyntaxNode& iter_node, const SourceUnit& unit) {
  const std::string_view src = unit.text();
  const SyntaxNode& iter = unparen(iter_node);
  if (iter.kind == NodeKind::List || iter.kind == NodeKind::Tuple || iter.kind == NodeKind::Set) {
    std::optional<std::size_t> arity;
    for (const SyntaxNode* element : node_children(iter)) {
      const SyntaxNode& e = unparen(*element);
      if (e.kind != NodeKind::Tuple && e.kind != NodeKind::List) return std::nullopt;
      if (contains_kind(e, {NodeKind::Starred})) return std::nullopt;
      const std::size_t n = node_children(e).size();
      if (arity && *arity != n) return std::size_t{0};
      arity = n;
    }
    return arity;
  }
  if (iter.kind == NodeKind::Call) {
    const SyntaxNode& func = iter.children.front();
    const auto args = node_children(iter);
    std::size_t positional = 0;
    for (std::size_t a = 1; a < args.size(); ++a) {
      const SyntaxNode& arg = *args[a];
      if (arg.children.size() != 1 || arg.children.front().kind == NodeKind::Starred) return std::nullopt;
      ++positional;
    }
    if (func.kind == NodeKind::Name && unit.text_of(func) == "zip" && positional >= 1) return positional;
    if (func.kind == NodeKind::Name && unit.text_of(func) == "enumerate") return std::size_t{2};
    if (func.kind == NodeKind::Attribute && func.children.size() == 3 &&
        src.substr(func.children[2].span.start, func.children[2].span.size()) == "items" && positional == 0) {
      return std::size_t{2};
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<SiteRewrite> for_multi_target_sites(const SourceUnit& unit, SafetyFacts& facts,
                                                const EngineOptions& options) {
  const std::string_view src = unit.text();
  std::vector<SiteRewrite> out;
  for (const SyntaxNode* loop : find_nodes(unit, NodeKind::For)) {
    const SyntaxNode* target = child_after(*loop, "for", src);
    const SyntaxNode* iter = child_after(*loop, "in", src);
    if (!target || target->kind != NodeKind::Name) continue;
    const std::string_view seq = unit.text_of(*target);
    const SyntaxNode* suite = body_suite(*loop);
    const auto items = node_children(*suite);

    struct Unpack {
      const SyntaxNode* item;
      std::string_view name;
      long index;
    };
    std::vector<Unpack> unpacks;
    for (const SyntaxNode* item : items) {
      const AssignParts a = name_assign(*item);
      if (!a || a.value->kind != NodeKind::Subscript || a.value->children.size() != 4) break;
      const SyntaxNode& base = a.value->children[0];
      if (base.kind != NodeKind::Name || unit.text_of(base) != seq) break;
      const long index = integer_value(a.value->children[2], src);
      if (index < 0) break;
      unpacks.push_back({item, unit.text_of(*a.target), index});
    }
    if (unpacks.size() < 2) continue;
    const std::size_t k = unpacks.size();

    SiteBuilder site(unit, IdiomKind::ForMultiTargets, loop->span);
    site.bind("sequence", seq).bind("iterable", unit.text_of(*iter));

    std::vector<std::string_view> by_index(k);
    bool complete = true;
    for (const auto& u : unpacks) {
      if (u.index >= static_cast<long>(k) || !by_index[static_cast<std::size_t>(u.index)].empty()) {
        complete = false;
        break;
      }
      by_index[static_cast<std::size_t>(u.index)] = u.name;
    }
    site.guard("complete_index_run", complete);
    std::set<std::string_view> distinct;
    for (const auto& u : unpacks) distinct.insert(u.name);
    site.guard("distinct_plain_targets", distinct.size() == k && !distinct.count(seq));

    bool seq_unused = true;
    for (std::size_t j = k; j < items.size(); ++j) seq_unused = seq_unused && !mentions_name(*items[j], unit, seq);
    if (const SyntaxNode* orelse = find_child(*loop, NodeKind::ElseClause)) {
      seq_unused = seq_unused && !mentions_name(*orelse, unit, seq);
    }
    site.guard("sequence_not_otherwise_used", seq_unused);
    site.guard("sequence_not_used_after_loop", !facts.escapes(seq, loop->span));
    site.guard("body_keeps_a_statement", items.size() > k);

    const auto arity = known_arity(*iter, unit);
    if (arity) {
      site.guard("element_arity", *arity == k);
    } else {
      site.guard("element_arity", options.strict_arity ? GuardOutcome::Unknown : GuardOutcome::Pass);
    }

    std::vector<Span> deleted;
    bool commented = false;
    for (const auto& u : unpacks) {
      deleted.push_back(full_lines(unit, u.item->span));
      commented = commented || has_comment(unit, deleted.back());
    }
    site.guard("no_comments_in_deleted_lines", !commented);

    if (site.passed()) {
      std::string names;
      for (std::size_t j = 0; j < k; ++j) names += (j ? ", " : "") + std::string(by_index[j]);
      site.bind("targets", names);
      site.edit(target->span, names);
      for (const Span& span : deleted) site.edit(span, "");
    }
    out.push_back(site.finish());
  }
  return out;
}

namespace {

bool is_bool_assign(const SyntaxNode& stmt, std::string_view name, std::string_view value, const SourceUnit& unit) {
  const AssignParts a = single_assign(stmt);
  return a && a.target->kind == NodeKind::Name && unit.text_of(*a.target) == name &&
         a.value->kind == NodeKind::Constant && unit.text_of(*a.value) == value;
}

// Statements directly governed by `loop`: nested loops, functions and
// classes are not entered.
template <typename Fn>
void walk_loop_body(const SyntaxNode& node, Fn&& fn) {
  for (const auto& child : node.children) {
    if (child.is_token()) continue;
    fn(child);
    if (child.kind == NodeKind::For || child.kind == NodeKind::While || child.kind == NodeKind::FunctionDef ||
        child.kind == NodeKind::ClassDef || child.kind == NodeKind::Lambda || child.kind == NodeKind::Decorated) {
      continue;
    }
    walk_loop_body(child, fn);
  }
}

}  // namespace

std::vector<SiteRewrite> loop_else_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions&) {
  const std::string_view src = unit.text();
  std::vector<SiteRewrite> out;
  for (const Block& block : collect_blocks(unit)) {
    for (std::size_t i = 0; i + 2 < block.items.size(); ++i) {
      const AssignParts init = name_assign(*block.items[i]);
      if (!init || init.value->kind != NodeKind::Constant || unit.text_of(*init.value) != "False") continue;
      const std::string_view flag = unit.text_of(*init.target);
      const SyntaxNode& loop = *block.items[i + 1];
      if (loop.kind != NodeKind::For && loop.kind != NodeKind::While) continue;
      const SyntaxNode& check = *block.items[i + 2];
      if (check.kind != NodeKind::If) continue;
      const SyntaxNode& test = unparen(check.children[1]);
      if (test.kind != NodeKind::UnaryOp || !test.children.front().is_token("not", src)) continue;
      const SyntaxNode& operand = unparen(test.children.back());
      if (operand.kind != NodeKind::Name || unit.text_of(operand) != flag) continue;

      std::vector<const SyntaxNode*> breaks;
      std::vector<const SyntaxNode*> sets;
      walk_loop_body(*body_suite(loop), [&](const SyntaxNode& n) {
        if (n.kind == NodeKind::Break) breaks.push_back(&n);
        if (n.kind == NodeKind::Assign && is_bool_assign(n, flag, "True", unit)) sets.push_back(&n);
      });
      if (sets.empty()) continue;

      SiteBuilder site(unit, IdiomKind::LoopElse, Span{block.items[i]->span.start, check.span.end});
      site.bind("flag", flag);
      site.guard("no_existing_else", !has_clause(loop, NodeKind::ElseClause));
      site.guard("no_elif_or_else_on_check",
                 !has_clause(check, NodeKind::ElifClause) && !has_clause(check, NodeKind::ElseClause));
      site.guard("single_flag_set", sets.size() == 1);
      site.guard("single_break", breaks.size() == 1);

      // The flag assignment must be immediately followed by the break.
      Span set_deletion{};
      bool adjacent = false;
      if (sets.size() == 1 && breaks.size() == 1) {
        const SyntaxNode* set_line = unit.parent(*sets.front());
        const SyntaxNode* break_line = unit.parent(*breaks.front());
        if (set_line == break_line) {
          const auto stmts = node_children(*set_line);
          for (std::size_t s = 0; s + 1 < stmts.size(); ++s) {
            if (stmts[s] == sets.front() && stmts[s + 1] == breaks.front()) {
              adjacent = true;
              set_deletion = Span{sets.front()->span.start, breaks.front()->span.start};
            }
          }
        } else if (sole_statement(*set_line) == sets.front() && set_line->kind == NodeKind::SimpleLine) {
          const SyntaxNode* owner = unit.parent(*set_line);
          if (owner && owner == unit.parent(*break_line)) {
            const auto siblings = node_children(*owner);
            for (std::size_t s = 0; s + 1 < siblings.size(); ++s) {
              if (siblings[s] == set_line && siblings[s + 1] == break_line &&
                  node_children(*break_line).front() == breaks.front()) {
                adjacent = true;
                set_deletion = full_lines(unit, set_line->span);
              }
            }
          }
        }
        // Only if/with may sit between the loop and the break.
        for (const SyntaxNode* cur = unit.parent(*breaks.front()); cur && cur != &loop; cur = unit.parent(*cur)) {
          const NodeKind k = cur->kind;
          if (k != NodeKind::SimpleLine && k != NodeKind::Suite && k != NodeKind::If && k != NodeKind::ElifClause &&
              k != NodeKind::ElseClause && k != NodeKind::With) {
            adjacent = false;
          }
        }
      }
      site.guard("flag_set_immediately_before_break", adjacent);

      const SyntaxNode* fn = enclosing_function(loop.span, unit);
      const SyntaxNode& scope = fn ? fn->children.back() : unit.tree();
      std::size_t uses = 0;
      for (const auto& occ : name_occurrences(scope, unit)) {
        if (occ.name == flag) ++uses;
      }
      site.guard("flag_used_only_by_pattern", uses == 3);
      site.guard("flag_not_used_after", !facts.escapes(flag, Span{block.items[i]->span.start, check.span.end}));

      const Span init_lines = full_lines(unit, block.items[i]->span);
      site.guard("no_comments_in_deleted_text",
                 !has_comment(unit, init_lines) && !(adjacent && has_comment(unit, set_deletion)));

      if (site.passed()) {
        const SyntaxNode* colon = find_token(check, ":", src);
        site.edit(init_lines, "");
        site.edit(set_deletion, "");
        site.edit(Span{check.span.start, colon->span.end}, "else:");
      }
      out.push_back(site.finish());
    }
  }
  return out;
}

}  // namespace pyidiom::detail
