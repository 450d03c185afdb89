#pragma once

// Conservative static facts used by the idiom guards. Everything here is
// intraprocedural and errs toward "unsafe": a fact that cannot be proven
// comes back Impure/Unknown, or as a dependency or escape.

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pyidiom/syntax.hpp"

namespace pyidiom {

enum class Purity { Pure, Impure, Unknown };
enum class Mutability { ImmutableLiteral, MutableLiteral, Unknown };

std::string_view to_string(Purity p);
std::string_view to_string(Mutability m);

struct AnalysisOptions {
  // Property getters can run arbitrary code, so attribute loads are
  // Unknown unless this is set.
  bool assume_pure_attributes = false;
};

/// One syntactic occurrence of a variable name.
struct NameOccurrence {
  std::string name;
  Span span;
  bool read = false;
  bool write = false;
  bool nested_scope = false;  // inside a def, lambda or class body
  bool declaration = false;   // named by a global or nonlocal statement
};

struct NameSets {
  std::set<std::string> reads;
  std::set<std::string> writes;

  bool mentions(const std::string& name) const { return reads.count(name) || writes.count(name); }
};

/// All name occurrences under `node` in document order. Stores inside
/// nested scopes are not reported as writes (they bind inner locals) but
/// their loads are reported as reads. Names bound by a comprehension are
/// not reported inside that comprehension.
std::vector<NameOccurrence> name_occurrences(const SyntaxNode& node, const SourceUnit& unit);

Purity classify_purity(const SyntaxNode& expr, const SourceUnit& unit, const AnalysisOptions& options = {});
Mutability classify_mutability(const SyntaxNode& expr, const SourceUnit& unit);

/// Read and write sets of one statement (or any subtree).
NameSets names_used(const SyntaxNode& node, const SourceUnit& unit);

/// Whether merging `earlier` and `later` (simple single-target
/// assignments, earlier first) into one tuple assignment could change
/// behavior.
bool depends_on(const SyntaxNode& later, const SyntaxNode& earlier, const SourceUnit& unit,
                const AnalysisOptions& options = {});

/// Whether `name` may be read after `region` executes, within the
/// function (or module) enclosing the region. Reads positioned after the
/// region count, as do reads elsewhere in a loop that encloses the region
/// and reads inside nested functions or lambdas.
bool escapes_region(std::string_view name, const Span& region, const SourceUnit& unit);

/// Innermost function definition containing `span`; nullptr at module
/// level.
const SyntaxNode* enclosing_function(const Span& span, const SourceUnit& unit);

/// Memoizing front end over the functions above for one SourceUnit. Not
/// thread-safe; create one per worker.
class SafetyFacts {
 public:
  SafetyFacts(SourceUnit unit, AnalysisOptions options = {});

  const SourceUnit& unit() const { return unit_; }
  const AnalysisOptions& options() const { return options_; }

  Purity purity(const SyntaxNode& expr);
  Mutability mutability(const SyntaxNode& expr);
  const NameSets& names(const SyntaxNode& stmt);
  bool depends_on(const SyntaxNode& later, const SyntaxNode& earlier);
  bool escapes(std::string_view name, const Span& region);

 private:
  SourceUnit unit_;
  AnalysisOptions options_;
  std::unordered_map<const SyntaxNode*, Purity> purity_;
  std::unordered_map<const SyntaxNode*, NameSets> names_;
};

}  // namespace pyidiom
