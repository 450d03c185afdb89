// Expression-level idioms: chained comparisons, truthiness tests and
// star-unpacking in calls.

#include <algorithm>
#include <set>

#include "common.hpp"

namespace pyidiom::detail {
namespace {

enum class Direction { Ascending, Descending, Equality, Identity, Other };

Direction direction(std::string_view op) {
  if (op == "<" || op == "<=") return Direction::Ascending;
  if (op == ">" || op == ">=") return Direction::Descending;
  if (op == "==") return Direction::Equality;
  if (op == "is") return Direction::Identity;
  return Direction::Other;
}

struct CompareParts {
  std::vector<const SyntaxNode*> operands;
  std::vector<std::string> ops;
};

CompareParts split_compare(const SyntaxNode& cmp, std::string_view src) {
  CompareParts parts;
  std::string pending;
  for (const auto& child : cmp.children) {
    if (child.is_token()) {
      if (!pending.empty()) pending += ' ';
      pending += std::string(src.substr(child.span.start, child.span.size()));
    } else {
      if (!parts.operands.empty()) parts.ops.push_back(pending);
      pending.clear();
      parts.operands.push_back(&child);
    }
  }
  return parts;
}

// All comparison operators of a run share one direction class.
bool directions_agree(const std::vector<const CompareParts*>& run) {
  std::optional<Direction> dir;
  for (const CompareParts* c : run) {
    for (const auto& op : c->ops) {
      const Direction d = direction(op);
      if (d == Direction::Other) return false;
      if (dir && *dir != d) return false;
      dir = d;
    }
  }
  return true;
}

}  // namespace

std::vector<SiteRewrite> chain_comparison_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions&) {
  const std::string_view src = unit.text();
  std::vector<SiteRewrite> out;
  for (const SyntaxNode* boolop : find_nodes(unit, NodeKind::BoolOp)) {
    bool conjunction = true;
    for (const auto& child : boolop->children) {
      if (child.is_token() && !child.is_token("and", src)) conjunction = false;
    }
    if (!conjunction) continue;
    const auto operands = node_children(*boolop);
    std::vector<const SyntaxNode*> cmps;
    std::vector<CompareParts> parts;
    for (const SyntaxNode* operand : operands) {
      const SyntaxNode& inner = unparen(*operand);
      cmps.push_back(inner.kind == NodeKind::Compare ? &inner : nullptr);
      parts.push_back(inner.kind == NodeKind::Compare ? split_compare(inner, src) : CompareParts{});
    }
    // Links: operand j ends with the operand that operand j+1 starts with.
    std::size_t j = 0;
    while (j + 1 < operands.size()) {
      auto linked = [&](std::size_t a) {
        return cmps[a] && cmps[a + 1] && same_tokens(*parts[a].operands.back(), *parts[a + 1].operands.front(), src);
      };
      if (!linked(j)) {
        ++j;
        continue;
      }
      std::size_t end = j + 1;
      while (end + 1 < operands.size() && linked(end)) ++end;
      const Span span{operands[j]->span.start, operands[end]->span.end};
      SiteBuilder site(unit, IdiomKind::ChainComparison, span);
      std::vector<const CompareParts*> run;
      for (std::size_t r = j; r <= end; ++r) run.push_back(&parts[r]);
      site.guard("conjunction_only", true);
      site.guard("compatible_directions", directions_agree(run));
      GuardOutcome shared = GuardOutcome::Pass;
      for (std::size_t r = j; r < end; ++r) {
        const SyntaxNode& middle = *parts[r].operands.back();
        site.bind("shared_" + std::to_string(r - j), unit.text_of(middle));
        const GuardOutcome g = purity_guard(facts.purity(middle));
        if (g == GuardOutcome::Fail || (g == GuardOutcome::Unknown && shared == GuardOutcome::Pass)) shared = g;
      }
      site.guard("shared_operand_pure", shared);
      site.guard("no_comments", !has_comment(unit, span));
      if (site.passed()) {
        std::string text(unit.text_of(*cmps[j]));
        for (std::size_t r = j + 1; r <= end; ++r) {
          const SyntaxNode& cmp = *cmps[r];
          text += std::string(src.substr(parts[r].operands.front()->span.end,
                                         cmp.span.end - parts[r].operands.front()->span.end));
        }
        site.edit(span, text);
      }
      out.push_back(site.finish());
      j = end + 1;
    }
  }
  return out;
}

namespace {

class BooleanContexts {
 public:
  BooleanContexts(const SourceUnit& unit) : unit_(unit), src_(unit.text()) {
    walk(unit.tree(), [&](const SyntaxNode& n) { seed(n); });
  }

  bool contains(const SyntaxNode* node) const { return nodes_.count(node) > 0; }

 private:
  void mark(const SyntaxNode& node) {
    nodes_.insert(&node);
    if (node.kind == NodeKind::Paren) mark(node.children[1]);
    if (node.kind == NodeKind::BoolOp) {
      for (const SyntaxNode* operand : node_children(node)) mark(*operand);
    }
  }

  void seed(const SyntaxNode& n) {
    switch (n.kind) {
      case NodeKind::If:
      case NodeKind::ElifClause:
      case NodeKind::While:
        mark(n.children[1]);
        break;
      case NodeKind::Assert:
        mark(n.children[1]);
        break;
      case NodeKind::UnaryOp:
        if (n.children.front().is_token("not", src_)) mark(n.children.back());
        break;
      case NodeKind::IfExp:
        if (const SyntaxNode* cond = child_after(n, "if", src_)) mark(*cond);
        break;
      case NodeKind::CompIf:
        mark(n.children.back());
        break;
      default:
        break;
    }
  }

  const SourceUnit& unit_;
  std::string_view src_;
  std::set<const SyntaxNode*> nodes_;
};

bool is_falsy_literal(const SyntaxNode& node, const SourceUnit& unit) {
  const std::string_view text = unit.text_of(node);
  switch (node.kind) {
    case NodeKind::Constant:
      return text == "None" || text == "0" || text == "0.0";
    case NodeKind::String:
      return text == "''" || text == "\"\"";
    case NodeKind::List:
    case NodeKind::Dict:
      return node.children.size() == 2;
    case NodeKind::Tuple:
      return node.children.size() == 2 && node.children.front().is_token("(", unit.text());
    case NodeKind::Call:
      return text == "set()";
    default:
      return false;
  }
}

// `len(X)` with one plain argument; returns X.
const SyntaxNode* len_argument(const SyntaxNode& node, const SourceUnit& unit) {
  if (node.kind != NodeKind::Call || node.children.front().kind != NodeKind::Name) return nullptr;
  if (unit.text_of(node.children.front()) != "len") return nullptr;
  const auto args = node_children(node);
  if (args.size() != 2 || args[1]->children.size() != 1) return nullptr;
  const SyntaxNode& arg = args[1]->children.front();
  if (arg.kind == NodeKind::Starred || arg.kind == NodeKind::GeneratorExp) return nullptr;
  return &arg;
}

struct TruthForm {
  const SyntaxNode* subject = nullptr;
  bool negated = false;   // true: falsy check, rewritten to `not X`
  bool none_check = false;
};

std::optional<TruthForm> truth_form(const SyntaxNode& cmp, const SourceUnit& unit, bool len_shadowed) {
  const CompareParts parts = split_compare(cmp, unit.text());
  const auto& operands = parts.operands;
  const auto& ops = parts.ops;
  if (operands.size() != 2) return std::nullopt;
  const std::string& op = ops.front();
  const SyntaxNode& left = *operands[0];
  const SyntaxNode& right = *operands[1];

  if (!len_shadowed) {
    const SyntaxNode* lhs_len = len_argument(left, unit);
    const bool zero_right = right.kind == NodeKind::Constant && unit.text_of(right) == "0";
    if (lhs_len && zero_right && (op == "==" || op == ">" || op == "!=")) {
      return TruthForm{lhs_len, op == "==", false};
    }
    const SyntaxNode* rhs_len = len_argument(right, unit);
    const bool zero_left = left.kind == NodeKind::Constant && unit.text_of(left) == "0";
    if (rhs_len && zero_left && (op == "==" || op == "<" || op == "!=")) {
      return TruthForm{rhs_len, op == "==", false};
    }
  }
  if (op != "==" && op != "!=") return std::nullopt;
  const bool left_falsy = is_falsy_literal(left, unit);
  const bool right_falsy = is_falsy_literal(right, unit);
  if (left_falsy == right_falsy) return std::nullopt;
  const SyntaxNode& literal = right_falsy ? right : left;
  const SyntaxNode& subject = right_falsy ? left : right;
  return TruthForm{&subject, op == "==", unit.text_of(literal) == "None"};
}

}  // namespace

std::vector<SiteRewrite> truth_value_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options) {
  const std::string_view src = unit.text();
  const BooleanContexts contexts(unit);
  const bool len_shadowed = name_rebound(unit, "len");
  std::vector<SiteRewrite> out;
  for (const SyntaxNode* cmp : find_nodes(unit, NodeKind::Compare)) {
    const auto form = truth_form(*cmp, unit, len_shadowed);
    if (!form) continue;
    const SyntaxNode& x = *form->subject;

    // `not (X == 0)` in a boolean context collapses to `X`.
    const SyntaxNode* replaced = cmp;
    bool collapse = false;
    const SyntaxNode* up = unit.parent(*cmp);
    while (up && up->kind == NodeKind::Paren) up = unit.parent(*up);
    if (up && up->kind == NodeKind::UnaryOp && up->children.front().is_token("not", src) && contexts.contains(up) &&
        !(options.strict_none && form->none_check)) {
      replaced = up;
      collapse = true;
    }

    SiteBuilder site(unit, IdiomKind::TruthValueTest, replaced->span);
    site.bind("subject", unit.text_of(x));
    site.guard("single_comparison", true);
    site.guard("boolean_context", contexts.contains(cmp));
    site.guard("subject_has_no_side_effects", facts.purity(x) != Purity::Impure);
    site.guard("no_comments", !has_comment(unit, replaced->span));
    if (site.passed()) {
      const std::string subject = operand_text(unit, x, {});
      std::string text;
      if (options.strict_none && form->none_check) {
        text = subject + (form->negated ? " is None" : " is not None");
      } else {
        const bool negated = collapse ? !form->negated : form->negated;
        text = negated ? "not " + subject : subject;
      }
      site.edit(replaced->span, text);
    }
    out.push_back(site.finish());
  }
  return out;
}

namespace {

struct IndexedArg {
  const SyntaxNode* arg;
  std::string_view base;
  long index;
};

std::optional<IndexedArg> indexed_arg(const SyntaxNode& arg, const SourceUnit& unit) {
  if (arg.kind != NodeKind::Argument || arg.children.size() != 1) return std::nullopt;
  const SyntaxNode& e = arg.children.front();
  if (e.kind != NodeKind::Subscript || e.children.size() != 4 || e.children[0].kind != NodeKind::Name) {
    return std::nullopt;
  }
  const long index = integer_value(e.children[2], unit.text());
  if (index < 0) return std::nullopt;
  return IndexedArg{&arg, unit.text_of(e.children[0]), index};
}

// The block item holding `node`, and the block. Fails when the path
// crosses a nested suite, a loop header, a lambda or a comprehension.
std::optional<std::pair<const SyntaxNode*, const SyntaxNode*>> statement_of(const SyntaxNode& node,
                                                                            const SourceUnit& unit) {
  const SyntaxNode* child = &node;
  for (const SyntaxNode* cur = unit.parent(node); cur; child = cur, cur = unit.parent(*cur)) {
    switch (cur->kind) {
      case NodeKind::Module:
      case NodeKind::Suite:
        return std::make_pair(child, cur);
      case NodeKind::Lambda:
      case NodeKind::ListComp:
      case NodeKind::SetComp:
      case NodeKind::DictComp:
      case NodeKind::GeneratorExp:
      case NodeKind::While:
        return std::nullopt;
      default:
        if (child->kind == NodeKind::Suite || child->kind == NodeKind::ElseClause ||
            child->kind == NodeKind::ElifClause || child->kind == NodeKind::ExceptClause ||
            child->kind == NodeKind::FinallyClause || child->kind == NodeKind::CaseClause) {
          return std::nullopt;
        }
        break;
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<SiteRewrite> star_call_sites(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions&) {
  std::vector<SiteRewrite> out;
  for (const SyntaxNode* call : find_nodes(unit, NodeKind::Call)) {
    const auto args = node_children(*call);
    std::size_t a = 1;
    while (a < args.size()) {
      const auto first = indexed_arg(*args[a], unit);
      if (!first || first->index != 0) {
        ++a;
        continue;
      }
      std::size_t end = a;
      while (end + 1 < args.size()) {
        const auto next = indexed_arg(*args[end + 1], unit);
        if (!next || next->base != first->base || next->index != static_cast<long>(end + 1 - a)) break;
        ++end;
      }
      const std::size_t n = end - a + 1;
      if (n < 2) {
        ++a;
        continue;
      }
      const Span span{args[a]->span.start, args[end]->span.end};
      SiteBuilder site(unit, IdiomKind::StarInCall, span);
      site.bind("sequence", first->base).bind("length", std::to_string(n));

      // The run must cover the whole sequence: find its literal definition
      // earlier in the same block.
      const auto holder = statement_of(*call, unit);
      GuardOutcome length_known = GuardOutcome::Unknown;
      bool untouched = false;
      if (holder) {
        const auto items = node_children(*holder->second);
        const auto pos = std::find(items.begin(), items.end(), holder->first);
        for (auto it = pos; it != items.begin();) {
          --it;
          const AssignParts def = name_assign(**it);
          if (def && unit.text_of(*def.target) == first->base) {
            const SyntaxNode& value = unparen(*def.value);
            if ((value.kind == NodeKind::Tuple || value.kind == NodeKind::List) &&
                !contains_kind(value, {NodeKind::Starred})) {
              length_known = node_children(value).size() == n ? GuardOutcome::Pass : GuardOutcome::Fail;
              untouched = true;
              for (auto mid = it + 1; mid != pos; ++mid) {
                const NameSets& names = facts.names(**mid);
                if (names.writes.count(std::string(first->base))) untouched = false;
                if (value.kind == NodeKind::List && names.mentions(std::string(first->base))) untouched = false;
              }
            }
            break;
          }
          if (facts.names(**it).writes.count(std::string(first->base))) break;
        }
      }
      // No trailing positional arguments from the same sequence.
      const bool closed = end + 1 >= args.size() || !indexed_arg(*args[end + 1], unit) ||
                          indexed_arg(*args[end + 1], unit)->base != first->base;
      site.guard("complete_index_run", closed);
      site.guard("sequence_length_known", length_known);
      site.guard("no_intervening_write", untouched);
      site.guard("no_comments", !has_comment(unit, span));
      if (site.passed()) site.edit(span, "*" + std::string(first->base));
      out.push_back(site.finish());
      a = end + 1;
    }
  }
  return out;
}

}  // namespace pyidiom::detail
