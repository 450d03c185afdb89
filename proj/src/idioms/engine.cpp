#include <algorithm>
#include <cctype>

#include "common.hpp"

namespace pyidiom {

namespace {

constexpr std::array<IdiomInfo, 12> kCatalogue = {{
    {IdiomKind::ListComp, "list_comprehension", "list comprehension", 202},
    {IdiomKind::ForMultiTargets, "for_multiple_targets", "for multiple targets", std::nullopt},
    {IdiomKind::ChainComparison, "chain_comparison", "chain comparison", std::nullopt},
    {IdiomKind::FString, "fstring", "fstring", 498},
    {IdiomKind::AssignMultiTargets, "assign_multiple_target", "assign multiple target", std::nullopt},
    {IdiomKind::StarInCall, "star_in_call", "star in function calls", 448},
    {IdiomKind::TruthValueTest, "truth_value_test", "truth value test", std::nullopt},
    {IdiomKind::LoopElse, "loop_else", "loop else", std::nullopt},
    {IdiomKind::With, "with", "with", 343},
    {IdiomKind::DictComp, "dict_comprehension", "dict comprehension", 274},
    {IdiomKind::ChainAssignSameValue, "chain_assign_same_value", "chain assign same value", std::nullopt},
    {IdiomKind::SetComp, "set_comprehension", "set comprehension", std::nullopt},
}};

struct Alias {
  std::string_view name;
  IdiomKind kind;
};

constexpr std::array<Alias, 24> kAliases = {{
    {"list_comp", IdiomKind::ListComp},
    {"listcomp", IdiomKind::ListComp},
    {"for_multi_tar", IdiomKind::ForMultiTargets},
    {"formultitargets", IdiomKind::ForMultiTargets},
    {"chain_compare", IdiomKind::ChainComparison},
    {"chaincomparison", IdiomKind::ChainComparison},
    {"f_string", IdiomKind::FString},
    {"ass_multi_tar", IdiomKind::AssignMultiTargets},
    {"assignmultitargets", IdiomKind::AssignMultiTargets},
    {"assign_multiple_targets", IdiomKind::AssignMultiTargets},
    {"star_call", IdiomKind::StarInCall},
    {"starincall", IdiomKind::StarInCall},
    {"star_in_function_calls", IdiomKind::StarInCall},
    {"truth_test", IdiomKind::TruthValueTest},
    {"truthvaluetest", IdiomKind::TruthValueTest},
    {"loopelse", IdiomKind::LoopElse},
    {"dict_comp", IdiomKind::DictComp},
    {"dictcomp", IdiomKind::DictComp},
    {"chain_ass", IdiomKind::ChainAssignSameValue},
    {"chainassignsamevalue", IdiomKind::ChainAssignSameValue},
    {"chain_assignment_of_the_same_value", IdiomKind::ChainAssignSameValue},
    {"set_comp", IdiomKind::SetComp},
    {"setcomp", IdiomKind::SetComp},
    {"list_comprehensions", IdiomKind::ListComp},
}};

std::string normalize(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == ' ' || c == '-') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

bool edits_clash(const RewritePlan& a, const RewritePlan& b) {
  for (const auto& x : a.edits) {
    for (const auto& y : b.edits) {
      if (x.span.overlaps(y.span)) return true;
      if (x.span.start == y.span.start && (x.span.empty() || y.span.empty())) return true;
    }
  }
  return false;
}

bool parses(const std::string& text) {
  try {
    parse(text);
    return true;
  } catch (const SyntaxError&) {
    return false;
  }
}

std::string apply_sites(const SourceUnit& unit, const std::vector<SiteRewrite>& sites) {
  std::vector<RewritePlan> plans;
  plans.reserve(sites.size());
  for (const auto& s : sites) plans.push_back(s.plan);
  return pyidiom::apply(unit.text(), plans);
}

// Keeps the sites whose combined output parses; normally all of them.
std::vector<SiteRewrite> keep_valid(const SourceUnit& unit, std::vector<SiteRewrite> sites,
                                    std::vector<DroppedSite>* dropped) {
  if (sites.empty() || parses(apply_sites(unit, sites))) return sites;
  std::vector<SiteRewrite> kept;
  for (auto& s : sites) {
    kept.push_back(s);
    if (!parses(apply_sites(unit, kept))) {
      kept.pop_back();
      if (dropped) dropped->push_back(DroppedSite{s.site, "invalid output"});
    }
  }
  return kept;
}

std::vector<SiteRewrite> dispatch(IdiomKind kind, const SourceUnit& unit, SafetyFacts& facts,
                                  const EngineOptions& options) {
  using namespace detail;
  switch (kind) {
    case IdiomKind::ListComp:
    case IdiomKind::DictComp:
    case IdiomKind::SetComp:
      return comprehension_sites(kind, unit, facts, options);
    case IdiomKind::ForMultiTargets: return for_multi_target_sites(unit, facts, options);
    case IdiomKind::ChainComparison: return chain_comparison_sites(unit, facts, options);
    case IdiomKind::FString: return fstring_sites(unit, facts, options);
    case IdiomKind::AssignMultiTargets: return assign_multi_sites(unit, facts, options);
    case IdiomKind::StarInCall: return star_call_sites(unit, facts, options);
    case IdiomKind::TruthValueTest: return truth_value_sites(unit, facts, options);
    case IdiomKind::LoopElse: return loop_else_sites(unit, facts, options);
    case IdiomKind::With: return with_sites(unit, facts, options);
    case IdiomKind::ChainAssignSameValue: return chain_assign_sites(unit, facts, options);
  }
  return {};
}

}  // namespace

const IdiomInfo& idiom_info(IdiomKind kind) { return kCatalogue[static_cast<std::size_t>(kind)]; }

std::string_view to_string(IdiomKind kind) { return idiom_info(kind).tag; }

std::optional<IdiomKind> parse_idiom(std::string_view name) {
  const std::string key = normalize(name);
  for (const auto& info : kCatalogue) {
    if (key == info.tag || key == normalize(info.display_name)) return info.kind;
  }
  for (const auto& alias : kAliases) {
    if (key == alias.name) return alias.kind;
  }
  return std::nullopt;
}

bool DetectionSite::passed() const {
  return std::all_of(guards.begin(), guards.end(), [](const GuardResult& g) { return g.outcome == GuardOutcome::Pass; });
}

const GuardResult* DetectionSite::first_failure() const {
  for (const auto& g : guards) {
    if (g.outcome != GuardOutcome::Pass) return &g;
  }
  return nullptr;
}

std::size_t RefactorReport::total() const {
  std::size_t sum = 0;
  for (const auto& [kind, n] : counts) sum += n;
  return sum;
}

std::vector<SiteRewrite> detect_candidates(IdiomKind kind, const SourceUnit& unit, SafetyFacts& facts,
                                           const EngineOptions& options) {
  auto sites = dispatch(kind, unit, facts, options);
  std::stable_sort(sites.begin(), sites.end(),
                   [](const SiteRewrite& a, const SiteRewrite& b) { return a.site.span.start < b.site.span.start; });
  return sites;
}

std::vector<SiteRewrite> refactor(IdiomKind kind, const SourceUnit& unit, SafetyFacts& facts,
                                  const EngineOptions& options) {
  std::vector<SiteRewrite> passing;
  for (auto& s : detect_candidates(kind, unit, facts, options)) {
    if (s.site.passed()) passing.push_back(std::move(s));
  }
  // Overlapping sites of one idiom are all dropped, so a second pass sees
  // the same conflict and stays a fixed point.
  std::vector<bool> clash(passing.size(), false);
  for (std::size_t i = 0; i < passing.size(); ++i) {
    for (std::size_t j = i + 1; j < passing.size(); ++j) {
      if (edits_clash(passing[i].plan, passing[j].plan)) clash[i] = clash[j] = true;
    }
  }
  std::vector<SiteRewrite> out;
  for (std::size_t i = 0; i < passing.size(); ++i) {
    if (!clash[i]) out.push_back(std::move(passing[i]));
  }
  return keep_valid(unit, std::move(out), nullptr);
}

#define PYIDIOM_REFACTOR_FN(fn, kind)                                                         \
  std::vector<SiteRewrite> fn(const SourceUnit& unit, SafetyFacts& facts, const EngineOptions& options) { \
    return refactor(kind, unit, facts, options);                                              \
  }

PYIDIOM_REFACTOR_FN(refactor_list_comp, IdiomKind::ListComp)
PYIDIOM_REFACTOR_FN(refactor_dict_comp, IdiomKind::DictComp)
PYIDIOM_REFACTOR_FN(refactor_set_comp, IdiomKind::SetComp)
PYIDIOM_REFACTOR_FN(refactor_for_multi_targets, IdiomKind::ForMultiTargets)
PYIDIOM_REFACTOR_FN(refactor_chain_comparison, IdiomKind::ChainComparison)
PYIDIOM_REFACTOR_FN(refactor_fstring, IdiomKind::FString)
PYIDIOM_REFACTOR_FN(refactor_assign_multi_targets, IdiomKind::AssignMultiTargets)
PYIDIOM_REFACTOR_FN(refactor_star_in_call, IdiomKind::StarInCall)
PYIDIOM_REFACTOR_FN(refactor_truth_value_test, IdiomKind::TruthValueTest)
PYIDIOM_REFACTOR_FN(refactor_loop_else, IdiomKind::LoopElse)
PYIDIOM_REFACTOR_FN(refactor_with, IdiomKind::With)
PYIDIOM_REFACTOR_FN(refactor_chain_assign_same_value, IdiomKind::ChainAssignSameValue)

#undef PYIDIOM_REFACTOR_FN

RefactorReport detect_all(const SourceUnit& unit, std::span<const IdiomKind> idioms, const EngineOptions& options,
                          std::string method_id) {
  RefactorReport report;
  report.method_id = std::move(method_id);
  SafetyFacts facts(unit, AnalysisOptions{options.assume_pure_attributes});
  std::vector<SiteRewrite> accepted;
  for (IdiomKind kind : kAllIdioms) {
    if (std::find(idioms.begin(), idioms.end(), kind) == idioms.end()) continue;
    report.counts[kind] = 0;
    const auto sites = refactor(kind, unit, facts, options);
    for (std::size_t i = 0; i < sites.size(); ++i) {
      for (std::size_t j = i + 1; j < sites.size(); ++j) {
        if (edits_clash(sites[i].plan, sites[j].plan)) {
          throw RewriteConflict("overlapping plans within " + std::string(to_string(kind)));
        }
      }
    }
    for (const auto& s : sites) {
      const auto winner = std::find_if(accepted.begin(), accepted.end(),
                                       [&](const SiteRewrite& a) { return edits_clash(a.plan, s.plan); });
      if (winner != accepted.end()) {
        report.dropped.push_back(DroppedSite{s.site, "overlaps " + std::string(to_string(winner->site.idiom))});
      } else {
        accepted.push_back(s);
      }
    }
  }
  accepted = keep_valid(unit, std::move(accepted), &report.dropped);
  std::stable_sort(accepted.begin(), accepted.end(),
                   [](const SiteRewrite& a, const SiteRewrite& b) { return a.site.span.start < b.site.span.start; });
  report.refactored_text = apply_sites(unit, accepted);
  for (const auto& s : accepted) {
    ++report.counts[s.site.idiom];
    report.applied.push_back(s.site);
  }
  return report;
}

RefactorReport refactor_text(std::string text, IdiomKind kind, const EngineOptions& options) {
  const SourceUnit unit = parse(std::move(text));
  const IdiomKind one[] = {kind};
  return detect_all(unit, one, options);
}

}  // namespace pyidiom
