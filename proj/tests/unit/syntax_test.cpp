#include <filesystem>

#include "doctest.h"
#include "pyidiom/syntax.hpp"
#include "support.hpp"

using namespace pyidiom;

TEST_CASE("minimal assignment round-trips") {
  const auto unit = parse("x = 1\n");
  CHECK(serialize(unit) == "x = 1\n");
  const auto assigns = find_nodes(unit, NodeKind::Assign);
  REQUIRE(assigns.size() == 1);
  CHECK(unit.text_of(*assigns[0]) == "x = 1");
  CHECK(slice_text(unit, assigns[0]->span) == "x = 1");
}

TEST_CASE("video reader has open() inside an assignment inside a def") {
  const auto unit = parse(testing::slurp(testing::fixture("reference/with_video.py")));
  const auto defs = find_nodes(unit, NodeKind::FunctionDef);
  REQUIRE_FALSE(defs.empty());
  bool found = false;
  for (const SyntaxNode* assign : find_nodes(*defs[0], NodeKind::Assign)) {
    for (const SyntaxNode* call : find_nodes(*assign, NodeKind::Call)) {
      if (unit.text_of(*call).starts_with("open(")) found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("syntax errors carry the offending position") {
  try {
    parse("def f(:\n");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 1);
    CHECK(e.offset() == 5);
  }
  try {
    parse("x = = 1\n");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 4);
    CHECK(e.column() == 4);
  }
  CHECK_THROWS_AS(parse("x = (1,\n"), SyntaxError);
  CHECK_THROWS_AS(parse("if x\n    pass\n"), SyntaxError);
  CHECK_THROWS_AS(parse("def f():\nreturn 1\n"), SyntaxError);
}

TEST_CASE("find_nodes in document order") {
  CHECK(find_nodes(parse("for x in xs:\n    pass\n"), NodeKind::For).size() == 1);
  CHECK(find_nodes(parse(""), NodeKind::For).empty());
  const auto unit = parse("a = 1\nb = 2\nc = 3\n");
  const auto assigns = find_nodes(unit, NodeKind::Assign);
  REQUIRE(assigns.size() == 3);
  CHECK(assigns[0]->span.start < assigns[1]->span.start);
  CHECK(assigns[1]->span.start < assigns[2]->span.start);
}

TEST_CASE("xor operands are comparisons") {
  const auto unit = parse(testing::slurp(testing::fixture("reference/xor_pages.py")));
  std::vector<std::string> texts;
  for (const SyntaxNode* c : find_nodes(unit, NodeKind::Compare)) texts.emplace_back(unit.text_of(*c));
  CHECK(std::find(texts.begin(), texts.end(), "my_page is None") != texts.end());
  CHECK(std::find(texts.begin(), texts.end(), "other_page is None") != texts.end());
}

TEST_CASE("slice_text bounds") {
  const auto unit = parse("x = 1\n");
  CHECK(slice_text(unit, Span{0, unit.text().size()}) == unit.text());
  CHECK_THROWS_AS(slice_text(unit, Span{3, 1}), OutOfBounds);
  CHECK_THROWS_AS(slice_text(unit, Span{0, 100}), OutOfBounds);
}

TEST_CASE("trivia survives: comments, continuations, blank lines, tabs") {
  const std::string text =
      "# header\n\n"
      "def f(a,  # first\n"
      "      b):\n"
      "\tif a and \\\n"
      "\t        b:\n"
      "\t\treturn f'{a!r:>{b}}'  # tail\n"
      "\n"
      "x = [1,\n   2]  # trailing\n";
  CHECK(serialize(parse(text)) == text);
}

TEST_CASE("modern grammar constructs parse") {
  const char* snippets[] = {
      "async def f():\n    async with a as b:\n        await b\n",
      "x = (y := 3)\n",
      "def f(a, /, b, *, c=1, **kw):\n    return lambda *a, **k: a\n",
      "print(*a, *b, **c, **d)\n",
      "match cmd:\n    case [x, y]:\n        pass\n    case {'k': v}:\n        pass\n    case _:\n        pass\n",
      "@dec(1)\nclass C(B, metaclass=M):\n    x: int = 0\n",
      "try:\n    pass\nexcept (A, B) as e:\n    raise X from e\nelse:\n    pass\nfinally:\n    pass\n",
      "s = rb'\\x00' b'' \"\"\"doc\n\"\"\"\n",
      "a[1:2, ::3] = {**m, 'k': [*v]}\n",
      "global g\ndel a[0], b\n",
      "f'{x=}' f\"{'nested'}\"\n",
  };
  for (const char* s : snippets) {
    CAPTURE(s);
    CHECK(serialize(parse(s)) == s);
  }
}

TEST_CASE("spans nest within parents and within the text") {
  const auto unit = parse(testing::slurp(testing::fixture("reference/assign_seed.py")));
  bool ok = true;
  walk(unit.tree(), [&](const SyntaxNode& n) {
    if (n.span.end > unit.text().size() || n.span.start > n.span.end) ok = false;
    for (const auto& c : n.children) {
      if (!n.span.contains(c.span)) ok = false;
    }
  });
  CHECK(ok);
}

TEST_CASE("every corpus file round-trips and parses deterministically") {
  for (const auto& entry : std::filesystem::directory_iterator(testing::corpus_dir())) {
    const std::string text = testing::slurp(entry.path());
    CAPTURE(entry.path().string());
    const auto a = parse(text);
    const auto b = parse(text);
    CHECK(serialize(a) == text);
    CHECK(dump_tree(a.tree()) == dump_tree(b.tree()));
  }
}

TEST_CASE("line index maps offsets") {
  const auto unit = parse("a = 1\nbb = 2\n");
  const auto lc = unit.line_index().locate(7);
  CHECK(lc.line == 2);
  CHECK(lc.column == 1);
}

TEST_CASE("indent detection") {
  CHECK(parse("if x:\n  y = 1\n").indent().unit == "  ");
  CHECK(parse("x = 1\n").indent().unit == "    ");
  CHECK(parse("if x:\n\ty = 1\n").indent().unit == "\t");
}
