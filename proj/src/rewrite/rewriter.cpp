#include "pyidiom/rewriter.hpp"

#include <algorithm>
#include <set>

namespace pyidiom {

std::string Provenance::describe() const {
  return idiom + " at line " + std::to_string(line) + " [" + std::to_string(span.start) + ", " +
         std::to_string(span.end) + ")";
}

OverlapError::OverlapError(Provenance first, Provenance second)
    : std::runtime_error("overlapping rewrites: " + first.describe() + " and " + second.describe()),
      first_(std::move(first)),
      second_(std::move(second)) {}

DedentUnderflow::DedentUnderflow(std::size_t line)
    : std::runtime_error("cannot dedent line " + std::to_string(line) + ": not enough indentation"), line_(line) {}

std::string apply(std::string_view text, std::span<const RewritePlan> plans) {
  struct Ref {
    const TextEdit* edit;
    const RewritePlan* plan;
  };
  std::vector<Ref> refs;
  for (const auto& plan : plans) {
    for (const auto& edit : plan.edits) {
      if (edit.span.end < edit.span.start || edit.span.end > text.size()) {
        throw OutOfBounds("edit span outside text in " + plan.provenance.describe());
      }
      refs.push_back({&edit, &plan});
    }
  }
  std::stable_sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) {
    if (a.edit->span.start != b.edit->span.start) return a.edit->span.start < b.edit->span.start;
    return a.edit->span.end < b.edit->span.end;
  });
  for (std::size_t i = 1; i < refs.size(); ++i) {
    const Span& prev = refs[i - 1].edit->span;
    const Span& cur = refs[i].edit->span;
    const bool clash = cur.start < prev.end || (cur.start == prev.start && (cur.empty() || prev.empty()));
    if (clash) throw OverlapError(refs[i - 1].plan->provenance, refs[i].plan->provenance);
  }
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  for (const auto& ref : refs) {
    out.append(text.substr(pos, ref.edit->span.start - pos));
    out.append(ref.edit->replacement);
    pos = ref.edit->span.end;
  }
  out.append(text.substr(pos));
  return out;
}

namespace {

// Calls fn(line_offset, line_text_without_break, break_text) per line.
template <typename Fn>
void for_each_line(std::string_view block, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < block.size()) {
    std::size_t eol = pos;
    while (eol < block.size() && block[eol] != '\n' && block[eol] != '\r') ++eol;
    std::size_t next = eol;
    if (next < block.size() && block[next] == '\r') ++next;
    if (next < block.size() && block[next] == '\n' && (next == eol || block[eol] == '\r')) ++next;
    fn(pos, block.substr(pos, eol - pos), block.substr(eol, next - eol));
    pos = next;
  }
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\f") == std::string_view::npos;
}

std::string shift_line(std::string_view line, int delta, std::string_view unit, std::size_t line_no) {
  if (delta >= 0 || is_blank(line)) {
    std::string out;
    if (!is_blank(line)) {
      for (int i = 0; i < delta; ++i) out.append(unit);
    }
    out.append(line);
    return out;
  }
  std::string_view rest = line;
  for (int i = 0; i < -delta; ++i) {
    if (rest.substr(0, unit.size()) != unit) throw DedentUnderflow(line_no);
    rest.remove_prefix(unit.size());
  }
  return std::string(rest);
}

std::string reindent_impl(std::string_view block, int delta, std::string_view unit,
                          const std::set<std::size_t>& protected_lines) {
  if (delta == 0) return std::string(block);
  std::string out;
  std::size_t line_no = 0;
  for_each_line(block, [&](std::size_t offset, std::string_view line, std::string_view brk) {
    ++line_no;
    if (protected_lines.count(offset)) {
      out.append(line);
    } else {
      out.append(shift_line(line, delta, unit, line_no));
    }
    out.append(brk);
  });
  return out;
}

}  // namespace

std::string reindent(std::string_view block, int delta, std::string_view unit) {
  return reindent_impl(block, delta, unit, {});
}

std::string reindent_span(const SourceUnit& unit, const Span& span, int delta) {
  const std::string_view block = unit.slice(span);
  std::set<std::size_t> protected_lines;
  for_each_line(block, [&](std::size_t offset, std::string_view, std::string_view) {
    const std::size_t abs = span.start + offset;
    for (const SyntaxNode* tok : unit.tokens()) {
      if (tok->token_type == TokenType::String && tok->span.start < abs && abs < tok->span.end) {
        protected_lines.insert(offset);
        break;
      }
    }
  });
  return reindent_impl(block, delta, unit.indent().unit, protected_lines);
}

std::string_view line_indent(const SourceUnit& unit, std::size_t offset) {
  const std::string_view text = unit.text();
  const std::size_t start = unit.line_index().line_start(offset);
  std::size_t end = start;
  while (end < text.size() && (text[end] == ' ' || text[end] == '\t' || text[end] == '\f')) ++end;
  return text.substr(start, end - start);
}

Span full_lines(const SourceUnit& unit, const Span& span) {
  const std::string_view text = unit.text();
  const std::size_t start = unit.line_index().line_start(span.start);
  std::size_t end = span.end;
  if (end > span.start && (text[end - 1] == '\n' || text[end - 1] == '\r')) {
    if (text[end - 1] == '\r' && end < text.size() && text[end] == '\n') ++end;
    return Span{start, end};
  }
  while (end < text.size() && text[end] != '\n' && text[end] != '\r') ++end;
  if (end < text.size() && text[end] == '\r') ++end;
  if (end < text.size() && text[end] == '\n') ++end;
  return Span{start, end};
}

}  // namespace pyidiom
