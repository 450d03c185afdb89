// Statement-run idioms: tuple assignment, chained assignment and
// with-statement resource scoping.

#include <algorithm>
#include <set>

#include "common.hpp"

namespace pyidiom::detail {
namespace {

constexpr std::initializer_list<NodeKind> kValueWrap = {NodeKind::Yield, NodeKind::NamedExpr, NodeKind::Starred,
                                                        NodeKind::Lambda};

// Runs of consecutive single-name assignments, each on its own line.
template <typename Accept>
std::vector<std::vector<const SyntaxNode*>> assignment_runs(const Block& block, Accept&& accept) {
  std::vector<std::vector<const SyntaxNode*>> runs;
  std::vector<const SyntaxNode*> run;
  auto flush = [&] {
    if (run.size() >= 2) runs.push_back(run);
    run.clear();
  };
  for (const SyntaxNode* item : block.items) {
    if (!name_assign(*item)) {
      flush();
      continue;
    }
    if (!run.empty() && !accept(run, item)) flush();
    run.push_back(item);
  }
  flush();
  return runs;
}

Span statements_span(const std::vector<const SyntaxNode*>& run) {
  return Span{sole_statement(*run.front())->span.start, sole_statement(*run.back())->span.end};
}

}  // namespace

std::vector<SiteRewrite> assign_multi_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions&) {
  std::vector<SiteRewrite> out;
  for (const Block& block : collect_blocks(unit)) {
    const auto runs = assignment_runs(block, [&](const std::vector<const SyntaxNode*>& run, const SyntaxNode* next) {
      return std::none_of(run.begin(), run.end(),
                          [&](const SyntaxNode* earlier) { return facts.depends_on(*next, *earlier); });
    });
    for (const auto& run : runs) {
      const Span span = statements_span(run);
      SiteBuilder site(unit, IdiomKind::AssignMultiTargets, span);
      std::string targets;
      std::string values;
      bool literal_tail = true;
      for (std::size_t i = 0; i < run.size(); ++i) {
        const AssignParts a = name_assign(*run[i]);
        targets += (i ? ", " : "") + std::string(unit.text_of(*a.target));
        values += (i ? ", " : "") + operand_text(unit, *a.value, kValueWrap);
        if (i > 0 && classify_mutability(*a.value, unit) != Mutability::ImmutableLiteral) literal_tail = false;
      }
      site.bind("targets", targets).bind("values", values);
      site.guard("pairwise_independent", true);
      // Inside a try, a raising right-hand side would leave earlier
      // targets unassigned after the merge.
      site.guard("no_partial_assignment_observable", literal_tail || !inside_try(unit, *run.front()));
      site.guard("no_comments", !has_comment(unit, span));
      if (site.passed()) site.edit(span, targets + " = " + values);
      out.push_back(site.finish());
    }
  }
  return out;
}

std::vector<SiteRewrite> chain_assign_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options) {
  const std::string_view src = unit.text();
  std::vector<SiteRewrite> out;
  for (const Block& block : collect_blocks(unit)) {
    const auto runs = assignment_runs(block, [&](const std::vector<const SyntaxNode*>& run, const SyntaxNode* next) {
      const AssignParts first = name_assign(*run.front());
      const AssignParts candidate = name_assign(*next);
      if (!same_tokens(*first.value, *candidate.value, src)) return false;
      const std::string_view name = unit.text_of(*candidate.target);
      return std::none_of(run.begin(), run.end(),
                          [&](const SyntaxNode* s) { return unit.text_of(*name_assign(*s).target) == name; });
    });
    for (const auto& run : runs) {
      const Span span = statements_span(run);
      const AssignParts first = name_assign(*run.front());
      SiteBuilder site(unit, IdiomKind::ChainAssignSameValue, span);
      std::string text;
      bool reads_target = false;
      for (const SyntaxNode* item : run) {
        const AssignParts a = name_assign(*item);
        text += std::string(unit.text_of(*a.target)) + " = ";
        reads_target = reads_target || facts.names(*first.value).reads.count(std::string(unit.text_of(*a.target)));
      }
      text += std::string(unit.text_of(*first.value));
      site.bind("value", unit.text_of(*first.value));
      const Mutability m = facts.mutability(*first.value);
      if (options.disable_mutability_guard) {
        site.guard("immutable_value", true);
      } else {
        site.guard("immutable_value", m == Mutability::ImmutableLiteral
                                          ? GuardOutcome::Pass
                                          : m == Mutability::MutableLiteral ? GuardOutcome::Fail : GuardOutcome::Unknown);
      }
      site.guard("value_reads_no_target", !reads_target);
      site.guard("no_comments", !has_comment(unit, span));
      if (site.passed()) site.edit(span, text);
      out.push_back(site.finish());
    }
  }
  return out;
}

namespace {

bool is_close_call(const SyntaxNode& item, std::string_view handle, const SourceUnit& unit) {
  const SyntaxNode* stmt = sole_statement(item);
  if (!stmt || stmt->kind != NodeKind::ExprStmt) return false;
  const SyntaxNode& call = stmt->children.front();
  if (call.kind != NodeKind::Call || call.children.size() != 3) return false;
  const SyntaxNode& func = call.children.front();
  return func.kind == NodeKind::Attribute && func.children.size() == 3 && func.children[0].kind == NodeKind::Name &&
         unit.text_of(func.children[0]) == handle && unit.text_of(func.children[2]) == "close";
}

}  // namespace

std::vector<SiteRewrite> with_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options) {
  std::vector<SiteRewrite> out;
  for (const Block& block : collect_blocks(unit)) {
    for (std::size_t i = 0; i + 1 < block.items.size(); ++i) {
      const AssignParts acquire = name_assign(*block.items[i]);
      if (!acquire || acquire.value->kind != NodeKind::Call) continue;
      const SyntaxNode& func = acquire.value->children.front();
      if (func.kind != NodeKind::Name) continue;
      const auto& names = options.acquire_functions;
      if (std::find(names.begin(), names.end(), unit.text_of(func)) == names.end()) continue;
      const std::string handle(unit.text_of(*acquire.target));

      // The region ends at an explicit close(), or else after the last
      // statement that uses the handle or a value derived from it.
      std::size_t last = i;
      std::optional<std::size_t> close;
      std::set<std::string> tainted{handle};
      for (std::size_t j = i + 1; j < block.items.size(); ++j) {
        if (is_close_call(*block.items[j], handle, unit)) {
          close = j;
          break;
        }
        const NameSets& used = facts.names(*block.items[j]);
        const bool uses = std::any_of(tainted.begin(), tainted.end(), [&](const std::string& n) { return used.reads.count(n); });
        if (uses) {
          last = j;
          tainted.insert(used.writes.begin(), used.writes.end());
        }
      }
      if (close) last = *close - 1;
      if (last == i) continue;

      const SyntaxNode& first_item = *block.items[i + 1];
      const SyntaxNode& last_item = *block.items[last];
      const Span body{first_item.span.start, last_item.span.end};
      const Span whole{block.items[i]->span.start, close ? block.items[*close]->span.end : last_item.span.end};
      SiteBuilder site(unit, IdiomKind::With, whole);
      site.bind("handle", handle).bind("acquire", unit.text_of(*acquire.value));

      bool reassigned = false;
      bool returned = false;
      bool aliased = false;
      bool nested_close = false;
      for (std::size_t j = i + 1; j <= last; ++j) {
        const SyntaxNode& item = *block.items[j];
        if (facts.names(item).writes.count(handle)) reassigned = true;
        walk(item, [&](const SyntaxNode& n) {
          if (n.kind == NodeKind::Return || n.kind == NodeKind::Yield) {
            for (const SyntaxNode* value : node_children(n)) {
              if (mentions_name(*value, unit, handle)) returned = true;
            }
          }
          if (n.kind == NodeKind::Assign) {
            const auto parts = node_children(n);
            const SyntaxNode& value = unparen(*parts.back());
            if (value.kind == NodeKind::Name && unit.text_of(value) == handle) aliased = true;
          }
          if (n.kind == NodeKind::SimpleLine && is_close_call(n, handle, unit)) nested_close = true;
          if (n.kind == NodeKind::Call && n.children.front().kind == NodeKind::Attribute) {
            const SyntaxNode& f = n.children.front();
            if (f.children[0].kind == NodeKind::Name && unit.text_of(f.children[0]) == handle &&
                unit.text_of(f.children[2]) == "close") {
              nested_close = true;
            }
          }
        });
      }
      site.guard("handle_not_reassigned", !reassigned);
      site.guard("handle_not_returned", !returned);
      site.guard("handle_not_aliased", !aliased);
      site.guard("no_other_close", !nested_close);
      site.guard("handle_not_used_after", !facts.escapes(handle, whole));
      const Span close_lines = close ? full_lines(unit, block.items[*close]->span) : Span{};
      site.guard("no_comments_in_deleted_lines", !close || !has_comment(unit, close_lines));

      if (site.passed()) {
        const SyntaxNode* stmt = sole_statement(*block.items[i]);
        site.edit(stmt->span, "with " + std::string(unit.text_of(*acquire.value)) + " as " + handle + ":");
        const Span lines = full_lines(unit, body);
        site.edit(lines, reindent_span(unit, lines, 1));
        if (close) site.edit(close_lines, "");
      }
      out.push_back(site.finish());
    }
  }
  return out;
}

}  // namespace pyidiom::detail
