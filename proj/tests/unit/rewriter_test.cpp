#include "doctest.h"
#include "pyidiom/rewriter.hpp"

using namespace pyidiom;

namespace {

RewritePlan plan(std::size_t start, std::size_t end, std::string text, std::string idiom = "t") {
  RewritePlan p;
  p.edits.push_back(TextEdit{Span{start, end}, std::move(text)});
  p.provenance = Provenance{std::move(idiom), Span{start, end}, 1};
  return p;
}

}  // namespace

TEST_CASE("apply replaces a single span") {
  const std::vector<RewritePlan> plans{plan(0, 5, "a = b = 1")};
  CHECK(pyidiom::apply("a = 1\nc = 2\n", plans) == "a = b = 1\nc = 2\n");
}

TEST_CASE("apply with no plans is the identity") {
  CHECK(pyidiom::apply("x\ny\n", {}) == "x\ny\n");
}

TEST_CASE("overlapping plans name both sites") {
  const std::vector<RewritePlan> plans{plan(0, 5, "A", "first"), plan(3, 8, "B", "second")};
  try {
    pyidiom::apply("0123456789", plans);
    FAIL("expected OverlapError");
  } catch (const OverlapError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("first") != std::string::npos);
    CHECK(msg.find("second") != std::string::npos);
  }
}

TEST_CASE("touching edits are allowed; coincident insertion is an overlap") {
  const std::vector<RewritePlan> touching{plan(0, 2, "A"), plan(2, 4, "B")};
  CHECK(pyidiom::apply("0123", touching) == "AB");
  const std::vector<RewritePlan> coincident{plan(2, 2, "X"), plan(2, 4, "Y")};
  CHECK_THROWS_AS(pyidiom::apply("0123", coincident), OverlapError);
}

TEST_CASE("reindent") {
  CHECK(reindent("    a = 1\n    b = 2\n", 1, "    ") == "        a = 1\n        b = 2\n");
  CHECK(reindent("    a = 1\n\n", 0, "    ") == "    a = 1\n\n");
  CHECK(reindent("\ta\n\n\tb\n", 1, "\t") == "\t\ta\n\n\t\tb\n");
  CHECK(reindent("        a\n", -1, "    ") == "    a\n");
  CHECK_THROWS_AS(reindent("a = 1\n", -1, "    "), DedentUnderflow);
}

TEST_CASE("reindent_span leaves multi-line string content alone") {
  const std::string text = "if x:\n    s = '''a\n  b'''\n    t = 1\n";
  const auto unit = parse(text);
  const std::size_t start = text.find("    s");
  const auto out = reindent_span(unit, Span{start, text.size()}, 1);
  CHECK(out == "        s = '''a\n  b'''\n        t = 1\n");
}

TEST_CASE("line helpers") {
  const auto unit = parse("if x:\n    y = 1\n");
  CHECK(line_indent(unit, unit.text().find('y')) == "    ");
  const Span s = full_lines(unit, Span{unit.text().find('y'), unit.text().find('1')});
  CHECK(unit.slice(s) == "    y = 1\n");
}
