#include "pyidiom/safety.hpp"

#include <algorithm>
#include <array>

namespace pyidiom {

std::string_view to_string(Purity p) {
  switch (p) {
    case Purity::Pure: return "pure";
    case Purity::Impure: return "impure";
    case Purity::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(Mutability m) {
  switch (m) {
    case Mutability::ImmutableLiteral: return "immutable_literal";
    case Mutability::MutableLiteral: return "mutable_literal";
    case Mutability::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

enum class Ctx { Load, Store, AugStore, Pattern };

bool is_comprehension(NodeKind k) {
  return k == NodeKind::ListComp || k == NodeKind::SetComp || k == NodeKind::DictComp ||
         k == NodeKind::GeneratorExp;
}

// Child expression following the token `text` among node's children.
const SyntaxNode* child_after(const SyntaxNode& node, std::string_view text, std::string_view src) {
  for (std::size_t i = 0; i + 1 < node.children.size(); ++i) {
    if (node.children[i].is_token(text, src) && !node.children[i + 1].is_token()) return &node.children[i + 1];
  }
  return nullptr;
}

class OccurrenceCollector {
 public:
  explicit OccurrenceCollector(const SourceUnit& unit) : unit_(unit), src_(unit.text()) {}

  std::vector<NameOccurrence> run(const SyntaxNode& node) {
    visit(node, Ctx::Load);
    return std::move(out_);
  }

 private:
  void record(const SyntaxNode& name_node, bool read, bool write) {
    std::string name(unit_.text_of(name_node));
    if (std::find(bound_.begin(), bound_.end(), name) != bound_.end()) return;
    NameOccurrence occ;
    occ.name = std::move(name);
    occ.span = name_node.span;
    occ.read = read;
    occ.write = write && nested_ == 0;
    occ.nested_scope = nested_ > 0;
    out_.push_back(std::move(occ));
  }

  void record_token(const SyntaxNode& tok) {
    NameOccurrence occ;
    occ.name = std::string(unit_.text_of(tok));
    occ.span = tok.span;
    occ.write = nested_ == 0;
    occ.nested_scope = nested_ > 0;
    out_.push_back(std::move(occ));
  }

  void visit_children(const SyntaxNode& node, Ctx ctx) {
    for (const auto& child : node.children) {
      if (!child.is_token()) visit(child, ctx);
    }
  }

  void visit(const SyntaxNode& node, Ctx ctx) {
    switch (node.kind) {
      case NodeKind::Token:
        return;
      case NodeKind::Name:
        if (ctx == Ctx::Load) record(node, true, false);
        else if (ctx == Ctx::Store) record(node, false, true);
        else record(node, true, true);
        return;
      case NodeKind::Tuple:
      case NodeKind::List:
      case NodeKind::Paren:
      case NodeKind::Starred:
        visit_children(node, ctx == Ctx::AugStore ? Ctx::Load : ctx);
        return;
      case NodeKind::Attribute:
      case NodeKind::Subscript:
        visit_children(node, ctx == Ctx::Pattern ? Ctx::Pattern : Ctx::Load);
        return;
      case NodeKind::Assign: {
        const auto parts = node_children(node);
        for (std::size_t i = 0; i < parts.size(); ++i) visit(*parts[i], i + 1 < parts.size() ? Ctx::Store : Ctx::Load);
        return;
      }
      case NodeKind::AugAssign: {
        const auto parts = node_children(node);
        visit(*parts.front(), Ctx::AugStore);
        for (std::size_t i = 1; i < parts.size(); ++i) visit(*parts[i], Ctx::Load);
        return;
      }
      case NodeKind::AnnAssign: {
        const auto parts = node_children(node);
        visit(*parts.front(), Ctx::Store);
        for (std::size_t i = 1; i < parts.size(); ++i) visit(*parts[i], Ctx::Load);
        return;
      }
      case NodeKind::Del:
        visit_children(node, Ctx::Store);
        return;
      case NodeKind::For:
      case NodeKind::CompFor: {
        const SyntaxNode* target = child_after(node, "for", src_);
        for (const auto& child : node.children) {
          if (!child.is_token()) visit(child, &child == target ? Ctx::Store : Ctx::Load);
        }
        return;
      }
      case NodeKind::WithItem:
      case NodeKind::ExceptClause:
      case NodeKind::MatchAs: {
        const SyntaxNode* target = child_after(node, "as", src_);
        for (const auto& child : node.children) {
          if (!child.is_token()) visit(child, &child == target ? Ctx::Store : ctx == Ctx::Pattern ? Ctx::Pattern : Ctx::Load);
        }
        return;
      }
      case NodeKind::NamedExpr: {
        const auto parts = node_children(node);
        // The walrus target binds in the enclosing function even from
        // inside a comprehension.
        auto saved = std::move(bound_);
        bound_.clear();
        visit(*parts.front(), Ctx::Store);
        bound_ = std::move(saved);
        visit(*parts.back(), Ctx::Load);
        return;
      }
      case NodeKind::Argument:
        if (node.children.size() >= 3 && node.children[1].is_token("=", src_)) {
          visit(node.children[2], ctx == Ctx::Pattern ? Ctx::Pattern : Ctx::Load);
        } else {
          visit_children(node, ctx == Ctx::Pattern ? Ctx::Pattern : Ctx::Load);
        }
        return;
      case NodeKind::Global:
      case NodeKind::Nonlocal:
        for (const auto& child : node.children) {
          if (child.kind != NodeKind::Name) continue;
          NameOccurrence occ;
          occ.name = std::string(unit_.text_of(child));
          occ.span = child.span;
          occ.read = true;
          occ.write = true;
          occ.nested_scope = nested_ > 0;
          occ.declaration = true;
          out_.push_back(std::move(occ));
        }
        return;
      case NodeKind::Import:
      case NodeKind::ImportFrom:
        visit_import(node);
        return;
      case NodeKind::FunctionDef:
        visit_function(node);
        return;
      case NodeKind::ClassDef:
        visit_class(node);
        return;
      case NodeKind::Lambda:
        for (const auto& child : node.children) {
          if (child.kind == NodeKind::Parameters) visit_parameters(child);
        }
        ++nested_;
        visit(*node_children(node).back(), Ctx::Load);
        --nested_;
        return;
      case NodeKind::CaseClause: {
        bool in_pattern = true;
        for (const auto& child : node.children) {
          if (child.is_token("if", src_) || child.is_token(":", src_)) in_pattern = false;
          if (!child.is_token()) visit(child, in_pattern ? Ctx::Pattern : Ctx::Load);
        }
        return;
      }
      default:
        break;
    }
    if (is_comprehension(node.kind)) {
      visit_comprehension(node);
      return;
    }
    visit_children(node, ctx == Ctx::Pattern ? Ctx::Pattern : Ctx::Load);
  }

  void visit_import(const SyntaxNode& node) {
    const auto& kids = node.children;
    const bool from = node.kind == NodeKind::ImportFrom;
    std::size_t i = 0;
    if (from) {
      while (i < kids.size() && !kids[i].is_token("import", src_)) ++i;
    }
    ++i;
    // Each clause: dotted name [as alias]; `import a.b` binds `a`,
    // `from m import a` binds `a`.
    while (i < kids.size()) {
      const SyntaxNode& tok = kids[i];
      if (tok.token_type != TokenType::Name) {
        ++i;
        continue;
      }
      const SyntaxNode* bound = &tok;
      std::size_t j = i + 1;
      while (j + 1 < kids.size() && kids[j].is_token(".", src_)) j += 2;
      if (j + 1 < kids.size() && kids[j].is_token("as", src_)) {
        bound = &kids[j + 1];
        j += 2;
      }
      record_token(*bound);
      i = j;
    }
  }

  void visit_parameters(const SyntaxNode& params) {
    for (const auto& param : params.children) {
      if (param.kind != NodeKind::Param) continue;
      // Defaults and annotations evaluate in the defining scope.
      for (const auto& part : param.children) {
        if (!part.is_token()) visit(part, Ctx::Load);
      }
    }
  }

  void visit_function(const SyntaxNode& node) {
    for (const auto& child : node.children) {
      if (child.kind == NodeKind::Parameters) visit_parameters(child);
    }
    const SyntaxNode* name_tok = nullptr;
    for (std::size_t i = 0; i + 1 < node.children.size(); ++i) {
      if (node.children[i].is_token("def", src_)) name_tok = &node.children[i + 1];
    }
    if (const SyntaxNode* ret = child_after(node, "->", src_)) visit(*ret, Ctx::Load);
    if (name_tok) record_token(*name_tok);
    ++nested_;
    visit(node.children.back(), Ctx::Load);
    --nested_;
  }

  void visit_class(const SyntaxNode& node) {
    for (const auto& child : node.children) {
      if (child.kind == NodeKind::Argument) visit(child, Ctx::Load);
    }
    if (node.children.size() > 1) record_token(node.children[1]);
    ++nested_;
    visit(node.children.back(), Ctx::Load);
    --nested_;
  }

  void visit_comprehension(const SyntaxNode& node) {
    std::vector<std::string> new_bound;
    const SyntaxNode* first_for = nullptr;
    for (const auto& child : node.children) {
      if (child.kind != NodeKind::CompFor) continue;
      if (!first_for) first_for = &child;
      if (const SyntaxNode* target = child_after(child, "for", src_)) {
        walk(*target, [&](const SyntaxNode& n) {
          if (n.kind == NodeKind::Name) new_bound.emplace_back(unit_.text_of(n));
        });
      }
    }
    // The first iterable is evaluated in the enclosing scope.
    const SyntaxNode* first_iter = first_for ? child_after(*first_for, "in", src_) : nullptr;
    if (first_iter) visit(*first_iter, Ctx::Load);
    const std::size_t saved = bound_.size();
    bound_.insert(bound_.end(), new_bound.begin(), new_bound.end());
    for (const auto& child : node.children) {
      if (child.is_token()) continue;
      if (child.kind == NodeKind::CompFor) {
        for (const auto& part : child.children) {
          if (!part.is_token() && &part != first_iter && &part != child_after(child, "for", src_)) visit(part, Ctx::Load);
        }
      } else {
        visit(child, Ctx::Load);
      }
    }
    bound_.resize(saved);
  }

  const SourceUnit& unit_;
  std::string_view src_;
  std::vector<NameOccurrence> out_;
  std::vector<std::string> bound_;
  int nested_ = 0;
};

Purity combine(Purity a, Purity b) {
  if (a == Purity::Impure || b == Purity::Impure) return Purity::Impure;
  if (a == Purity::Unknown || b == Purity::Unknown) return Purity::Unknown;
  return Purity::Pure;
}

Purity children_purity(const SyntaxNode& node, const SourceUnit& unit, const AnalysisOptions& options) {
  Purity p = Purity::Pure;
  for (const auto& child : node.children) {
    if (!child.is_token()) p = combine(p, classify_purity(child, unit, options));
  }
  return p;
}

// Impure when something inside has a visible effect, otherwise Unknown.
Purity at_best_unknown(Purity p) { return p == Purity::Impure ? Purity::Impure : Purity::Unknown; }

// Assign with a single target: returns {target, value}.
std::pair<const SyntaxNode*, const SyntaxNode*> single_assign(const SyntaxNode& stmt) {
  const SyntaxNode* node = &stmt;
  if (node->kind == NodeKind::SimpleLine) {
    const auto parts = node_children(*node);
    if (parts.size() != 1) return {nullptr, nullptr};
    node = parts.front();
  }
  if (node->kind != NodeKind::Assign) return {nullptr, nullptr};
  const auto parts = node_children(*node);
  if (parts.size() != 2) return {nullptr, nullptr};
  return {parts[0], parts[1]};
}

}  // namespace

std::vector<NameOccurrence> name_occurrences(const SyntaxNode& node, const SourceUnit& unit) {
  return OccurrenceCollector(unit).run(node);
}

Purity classify_purity(const SyntaxNode& expr, const SourceUnit& unit, const AnalysisOptions& options) {
  switch (expr.kind) {
    case NodeKind::Name:
    case NodeKind::Constant:
    case NodeKind::String:
      return Purity::Pure;
    case NodeKind::Tuple:
    case NodeKind::List:
    case NodeKind::Paren:
    case NodeKind::Subscript:
    case NodeKind::Slice:
    case NodeKind::UnaryOp:
    case NodeKind::BinOp:
    case NodeKind::BoolOp:
    case NodeKind::Compare:
    case NodeKind::IfExp:
      return children_purity(expr, unit, options);
    case NodeKind::Call:
    case NodeKind::Yield:
    case NodeKind::Await:
    case NodeKind::NamedExpr:
      return Purity::Impure;
    case NodeKind::Attribute: {
      const Purity base = classify_purity(expr.children.front(), unit, options);
      return options.assume_pure_attributes ? base : at_best_unknown(base);
    }
    case NodeKind::FormattedString: {
      // Interpolated fields are not parsed; a call inside one is still a
      // call.
      const std::string_view text = unit.text_of(expr);
      return text.find('(') != std::string_view::npos ? Purity::Impure : Purity::Unknown;
    }
    case NodeKind::Lambda:
      return Purity::Unknown;
    default:
      return at_best_unknown(children_purity(expr, unit, options));
  }
}

Mutability classify_mutability(const SyntaxNode& expr, const SourceUnit& unit) {
  switch (expr.kind) {
    case NodeKind::Constant:
    case NodeKind::String:
      return Mutability::ImmutableLiteral;
    case NodeKind::UnaryOp: {
      const auto& operand = expr.children.back();
      const bool numeric = operand.kind == NodeKind::Constant && first_token(operand)->token_type == TokenType::Number;
      return numeric && !expr.children.front().is_token("not", unit.text()) ? Mutability::ImmutableLiteral
                                                                             : Mutability::Unknown;
    }
    case NodeKind::Paren:
      return classify_mutability(expr.children[1], unit);
    case NodeKind::Tuple: {
      for (const auto* element : node_children(expr)) {
        if (classify_mutability(*element, unit) != Mutability::ImmutableLiteral) return Mutability::Unknown;
      }
      return Mutability::ImmutableLiteral;
    }
    case NodeKind::List:
    case NodeKind::Dict:
    case NodeKind::Set:
    case NodeKind::ListComp:
    case NodeKind::DictComp:
    case NodeKind::SetComp:
      return Mutability::MutableLiteral;
    case NodeKind::Call: {
      static constexpr std::array kFactories = {"list", "dict", "set", "bytearray"};
      const auto& func = expr.children.front();
      if (func.kind == NodeKind::Name &&
          std::find(kFactories.begin(), kFactories.end(), unit.text_of(func)) != kFactories.end()) {
        return Mutability::MutableLiteral;
      }
      return Mutability::Unknown;
    }
    default:
      return Mutability::Unknown;
  }
}

NameSets names_used(const SyntaxNode& node, const SourceUnit& unit) {
  NameSets sets;
  for (const auto& occ : name_occurrences(node, unit)) {
    if (occ.read) sets.reads.insert(occ.name);
    if (occ.write) sets.writes.insert(occ.name);
  }
  return sets;
}

bool depends_on(const SyntaxNode& later, const SyntaxNode& earlier, const SourceUnit& unit,
                const AnalysisOptions& options) {
  const auto [late_target, late_value] = single_assign(later);
  const auto [early_target, early_value] = single_assign(earlier);
  if (!late_target || !early_target) return true;
  if (late_target->kind != NodeKind::Name || early_target->kind != NodeKind::Name) return true;
  const std::string_view late_name = unit.text_of(*late_target);
  const std::string_view early_name = unit.text_of(*early_target);
  if (late_name == early_name) return true;
  const NameSets early_sets = names_used(earlier, unit);
  for (const auto& occ : name_occurrences(*late_value, unit)) {
    if (occ.read && early_sets.writes.count(occ.name)) return true;
  }
  return classify_purity(*late_value, unit, options) != Purity::Pure;
}

const SyntaxNode* enclosing_function(const Span& span, const SourceUnit& unit) {
  const SyntaxNode* found = nullptr;
  walk(unit.tree(), [&](const SyntaxNode& n) {
    if (n.kind == NodeKind::FunctionDef && !n.children.empty() && n.children.back().span.contains(span)) found = &n;
  });
  return found;
}

namespace {

bool target_binds(const SyntaxNode& target, std::string_view name, const SourceUnit& unit) {
  switch (target.kind) {
    case NodeKind::Name:
      return unit.text_of(target) == name;
    case NodeKind::Tuple:
    case NodeKind::List:
    case NodeKind::Paren:
    case NodeKind::Starred:
      for (const auto& c : target.children) {
        if (!c.is_token() && target_binds(c, name, unit)) return true;
      }
      return false;
    default:
      return false;
  }
}

}  // namespace

bool escapes_region(std::string_view name, const Span& region, const SourceUnit& unit) {
  const SyntaxNode* fn = enclosing_function(region, unit);
  const SyntaxNode& scope = fn ? fn->children.back() : unit.tree();
  std::vector<Span> loops;
  // Bodies of other for-loops that bind `name` on every iteration before
  // the body runs; reads there cannot observe the region's value.
  std::vector<Span> rebinding_bodies;
  bool dynamic_scope_access = false;
  walk(scope, [&](const SyntaxNode& n) {
    if ((n.kind == NodeKind::For || n.kind == NodeKind::While) && n.span.contains(region) && n.span != region) {
      loops.push_back(n.span);
    }
    if (n.kind == NodeKind::For && !n.span.overlaps(region)) {
      const auto kids = node_children(n);
      const auto suite = std::find_if(kids.begin(), kids.end(), [](const SyntaxNode* c) { return c->kind == NodeKind::Suite; });
      if (!kids.empty() && suite != kids.end() && target_binds(*kids.front(), name, unit)) {
        rebinding_bodies.push_back((*suite)->span);
      }
    }
  });
  for (const auto& occ : name_occurrences(scope, unit)) {
    if (occ.read && (occ.name == "locals" || occ.name == "vars" || occ.name == "eval" || occ.name == "exec")) {
      dynamic_scope_access = true;
    }
    if (occ.name != name) continue;
    if (occ.declaration) return true;
    if (!occ.read) continue;
    if (occ.nested_scope) return true;
    if (std::any_of(rebinding_bodies.begin(), rebinding_bodies.end(),
                    [&](const Span& body) { return body.contains(occ.span); })) {
      continue;
    }
    if (occ.span.start >= region.end) return true;
    if (region.contains(occ.span)) continue;
    for (const Span& loop : loops) {
      if (loop.contains(occ.span)) return true;
    }
  }
  return dynamic_scope_access;
}

SafetyFacts::SafetyFacts(SourceUnit unit, AnalysisOptions options) : unit_(std::move(unit)), options_(options) {}

Purity SafetyFacts::purity(const SyntaxNode& expr) {
  const auto it = purity_.find(&expr);
  if (it != purity_.end()) return it->second;
  const Purity p = classify_purity(expr, unit_, options_);
  purity_.emplace(&expr, p);
  return p;
}

Mutability SafetyFacts::mutability(const SyntaxNode& expr) { return classify_mutability(expr, unit_); }

const NameSets& SafetyFacts::names(const SyntaxNode& stmt) {
  auto it = names_.find(&stmt);
  if (it == names_.end()) it = names_.emplace(&stmt, names_used(stmt, unit_)).first;
  return it->second;
}

bool SafetyFacts::depends_on(const SyntaxNode& later, const SyntaxNode& earlier) {
  return pyidiom::depends_on(later, earlier, unit_, options_);
}

bool SafetyFacts::escapes(std::string_view name, const Span& region) {
  return escapes_region(name, region, unit_);
}

}  // namespace pyidiom
