#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pyidiom/rewriter.hpp"
#include "pyidiom/safety.hpp"
#include "pyidiom/syntax.hpp"

namespace pyidiom {

/// The twelve idioms, in the fixed order used for overlap arbitration.
enum class IdiomKind {
  ListComp,
  ForMultiTargets,
  ChainComparison,
  FString,
  AssignMultiTargets,
  StarInCall,
  TruthValueTest,
  LoopElse,
  With,
  DictComp,
  ChainAssignSameValue,
  SetComp,
};

inline constexpr std::array<IdiomKind, 12> kAllIdioms = {
    IdiomKind::ListComp,       IdiomKind::ForMultiTargets, IdiomKind::ChainComparison,
    IdiomKind::FString,        IdiomKind::AssignMultiTargets, IdiomKind::StarInCall,
    IdiomKind::TruthValueTest, IdiomKind::LoopElse,        IdiomKind::With,
    IdiomKind::DictComp,       IdiomKind::ChainAssignSameValue, IdiomKind::SetComp,
};

struct IdiomInfo {
  IdiomKind kind;
  std::string_view tag;           // snake_case identifier used in files and CLI
  std::string_view display_name;  // catalogue name
  std::optional<int> pep;
};

const IdiomInfo& idiom_info(IdiomKind kind);
std::string_view to_string(IdiomKind kind);

/// Accepts tags, display names and the short dataset aliases
/// (e.g. "list_comp", "chain_compare", "ass_multi_tar").
std::optional<IdiomKind> parse_idiom(std::string_view name);

enum class GuardOutcome { Pass, Fail, Unknown };

struct GuardResult {
  std::string name;
  GuardOutcome outcome = GuardOutcome::Pass;
};

struct DetectionSite {
  IdiomKind idiom = IdiomKind::ListComp;
  Span span;
  std::size_t line = 0;
  std::map<std::string, std::string> bindings;
  std::vector<GuardResult> guards;

  /// True when every guard passed. Unknown outcomes block.
  bool passed() const;
  const GuardResult* first_failure() const;
};

struct SiteRewrite {
  DetectionSite site;
  RewritePlan plan;  // empty when the site did not pass its guards
};

struct EngineOptions {
  bool strict_none = false;             // `X == None` -> `X is None` rather than `not X`
  bool assume_pure_attributes = false;  // treat attribute loads as Pure
  bool strict_arity = false;            // require a provable element length for loop unpacking
  std::vector<std::string> acquire_functions{"open"};
  bool disable_mutability_guard = false;  // test-only: lets chain assignment alias mutable values
};

/// Every candidate site of one idiom, including ones whose guards failed.
std::vector<SiteRewrite> detect_candidates(IdiomKind kind, const SourceUnit& unit, SafetyFacts& facts,
                                           const EngineOptions& options = {});

/// Sites of one idiom whose guards all pass, pairwise non-overlapping,
/// each with its plan. Candidates that overlap each other are all dropped.
std::vector<SiteRewrite> refactor(IdiomKind kind, const SourceUnit& unit, SafetyFacts& facts,
                                  const EngineOptions& options = {});

std::vector<SiteRewrite> refactor_list_comp(const SourceUnit&, SafetyFacts&, const EngineOptions& = {});
std::vector<SiteRewrite> refactor_dict_comp(const SourceUnit&, SafetyFacts&, const EngineOptions& = {});
std::vector<SiteRewrite> refactor_set_comp(const SourceUnit&, SafetyFacts&, const EngineOptions& = {});
std::vector<SiteRewrite> refactor_for_multi_targets(const SourceUnit&, SafetyFacts&, const EngineOptions& = {});
std::vector<SiteRewrite> refactor_chain_comparison(const SourceUnit&, SafetyFacts&, const EngineOptions& = {});
std::vector<SiteRewrite> refactor_fstring(const SourceUnit&, SafetyFacts&, const EngineOptions& = {});
std::vector<SiteRewrite> refactor_assign_multi_targets(const SourceUnit&, SafetyFacts&, const EngineOptions& = {});
std::vector<SiteRewrite> refactor_star_in_call(const SourceUnit&, SafetyFacts&, const EngineOptions& = {});
std::vector<SiteRewrite> refactor_truth_value_test(const SourceUnit&, SafetyFacts&, const EngineOptions& = {});
std::vector<SiteRewrite> refactor_loop_else(const SourceUnit&, SafetyFacts&, const EngineOptions& = {});
std::vector<SiteRewrite> refactor_with(const SourceUnit&, SafetyFacts&, const EngineOptions& = {});
std::vector<SiteRewrite> refactor_chain_assign_same_value(const SourceUnit&, SafetyFacts&, const EngineOptions& = {});

struct DroppedSite {
  DetectionSite site;
  std::string reason;  // "overlaps <idiom>" or "invalid output"
};

struct RefactorReport {
  std::string method_id;
  std::map<IdiomKind, std::size_t> counts;  // every selected idiom present, possibly 0
  std::string refactored_text;
  std::vector<DetectionSite> applied;
  std::vector<DroppedSite> dropped;

  std::size_t total() const;
};

/// Internal invariant violation: one idiom produced overlapping plans.
class RewriteConflict : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

RefactorReport detect_all(const SourceUnit& unit, std::span<const IdiomKind> idioms,
                          const EngineOptions& options = {}, std::string method_id = "");

/// Convenience: parse `text`, run one idiom, return the report.
RefactorReport refactor_text(std::string text, IdiomKind kind, const EngineOptions& options = {});

}  // namespace pyidiom
