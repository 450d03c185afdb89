#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pyidiom/syntax.hpp"

namespace pyidiom {

struct TextEdit {
  Span span;
  std::string replacement;
};

/// Where a plan came from; printed in conflict reports.
struct Provenance {
  std::string idiom;
  Span span;
  std::size_t line = 0;

  std::string describe() const;
};

struct RewritePlan {
  std::vector<TextEdit> edits;  // sorted by start, pairwise disjoint
  Provenance provenance;
};

class OverlapError : public std::runtime_error {
 public:
  OverlapError(Provenance first, Provenance second);

  const Provenance& first() const { return first_; }
  const Provenance& second() const { return second_; }

 private:
  Provenance first_;
  Provenance second_;
};

class DedentUnderflow : public std::runtime_error {
 public:
  explicit DedentUnderflow(std::size_t line);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Replaces every edit span of every plan. Bytes outside the spans are
/// copied unchanged. Edits that merely touch (end == start) are allowed;
/// an insertion at the same offset as another edit counts as an overlap.
std::string apply(std::string_view text, std::span<const RewritePlan> plans);

/// Shifts the indentation of every non-blank line of `block` by `delta`
/// units. `block` must consist of whole lines.
std::string reindent(std::string_view block, int delta, std::string_view unit);

/// Like reindent, but leaves alone lines that begin inside a multi-line
/// string token of `unit`, since their leading whitespace is string
/// content. `span` must start at a line start.
std::string reindent_span(const SourceUnit& unit, const Span& span, int delta);

/// Leading whitespace of the line containing `offset`.
std::string_view line_indent(const SourceUnit& unit, std::size_t offset);

/// Span of the whole physical lines covering `span`, including the final
/// line break.
Span full_lines(const SourceUnit& unit, const Span& span);

}  // namespace pyidiom
