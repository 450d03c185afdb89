#include "doctest.h"
#include "pyidiom/safety.hpp"

using namespace pyidiom;

namespace {

// Expression of the single expression statement `text`.
struct Expr {
  SourceUnit unit;
  const SyntaxNode* node = nullptr;

  explicit Expr(const std::string& text) : unit(parse(text + "\n")) {
    walk(unit.tree(), [&](const SyntaxNode& n) {
      if (!node && n.is_expression() && unit.text_of(n) == text) node = &n;
    });
    REQUIRE(node != nullptr);
  }
};

Purity purity(const std::string& text, bool attrs = false) {
  Expr e(text);
  return classify_purity(*e.node, e.unit, AnalysisOptions{attrs});
}

Mutability mutability(const std::string& text) {
  Expr e(text);
  return classify_mutability(*e.node, e.unit);
}

bool depends(const std::string& code) {
  const auto unit = parse(code);
  const auto assigns = find_nodes(unit, NodeKind::Assign);
  REQUIRE(assigns.size() == 2);
  return depends_on(*assigns[1], *assigns[0], unit);
}

}  // namespace

TEST_CASE("purity rule table") {
  CHECK(purity("b") == Purity::Pure);
  CHECK(purity("f(x)") == Purity::Impure);
  CHECK(purity("other_page is None") == Purity::Pure);
  CHECK(purity("(a, [b, 1])") == Purity::Pure);
  CHECK(purity("a[i + 1]") == Purity::Pure);
  CHECK(purity("not a or -b < c") == Purity::Pure);
  CHECK(purity("a[f()]") == Purity::Impure);
  CHECK(purity("obj.attr") == Purity::Unknown);
  CHECK(purity("obj.attr", true) == Purity::Pure);
  CHECK(purity("obj.method()", true) == Purity::Impure);
}

TEST_CASE("mutability rule table") {
  CHECK(mutability("0") == Mutability::ImmutableLiteral);
  CHECK(mutability("'s'") == Mutability::ImmutableLiteral);
  CHECK(mutability("None") == Mutability::ImmutableLiteral);
  CHECK(mutability("(1, 'a', True)") == Mutability::ImmutableLiteral);
  CHECK(mutability("[]") == Mutability::MutableLiteral);
  CHECK(mutability("{}") == Mutability::MutableLiteral);
  CHECK(mutability("set()") == Mutability::MutableLiteral);
  CHECK(mutability("dict()") == Mutability::MutableLiteral);
  CHECK(mutability("make_thing()") == Mutability::Unknown);
  CHECK(mutability("x") == Mutability::Unknown);
}

TEST_CASE("depends_on") {
  CHECK_FALSE(depends("_SEED = 43\n_K = 10\n"));
  CHECK(depends("a = 1\nb = a + 1\n"));
  CHECK(depends("a = f()\nb = g()\n"));
  CHECK_FALSE(depends("a = b\nb = 2\n"));
}

TEST_CASE("names_used splits reads and writes") {
  const auto unit = parse("x = y + z\n");
  const auto sets = names_used(*find_nodes(unit, NodeKind::Assign)[0], unit);
  CHECK(sets.writes == std::set<std::string>{"x"});
  CHECK(sets.reads == std::set<std::string>{"y", "z"});
}

TEST_CASE("escapes_region") {
  const std::string flag_code =
      "def f(xs, t):\n"
      "    found = False\n"
      "    for x in xs:\n"
      "        if x == t:\n"
      "            found = True\n"
      "            break\n"
      "    if not found:\n"
      "        print('missing')\n";
  const auto unit = parse(flag_code);
  const auto fn = find_nodes(unit, NodeKind::FunctionDef)[0];
  const auto ifs = find_nodes(*fn, NodeKind::If);
  const Span region{find_nodes(*fn, NodeKind::Assign)[0]->span.start, ifs.back()->span.end};
  CHECK_FALSE(escapes_region("found", region, unit));

  const std::string returned =
      "def g(p):\n"
      "    fh = open(p)\n"
      "    data = fh.read()\n"
      "    return fh\n";
  const auto u2 = parse(returned);
  const auto a2 = find_nodes(u2, NodeKind::Assign);
  CHECK(escapes_region("fh", Span{a2[0]->span.start, a2[1]->span.end}, u2));

  const auto u3 = parse("def h():\n    t = 1\n    return 2\n");
  CHECK_FALSE(escapes_region("t", find_nodes(u3, NodeKind::Assign)[0]->span, u3));
}

TEST_CASE("escapes_region is monotone under appended reads") {
  std::string code = "def f():\n    v = 1\n    w = 2\n";
  const char* extras[] = {"    print(w)\n", "    print(v)\n", "    print(w)\n", "    return 0\n"};
  bool previous = false;
  for (const char* extra : extras) {
    code += extra;
    const auto unit = parse(code);
    const bool now = escapes_region("v", find_nodes(unit, NodeKind::Assign)[0]->span, unit);
    CHECK((!previous || now));
    previous = now;
  }
  CHECK(previous);
}

TEST_CASE("SafetyFacts memoizes consistently with the free functions") {
  const auto unit = parse("a = b[0] + f(c)\n");
  SafetyFacts facts(unit);
  const auto* stmt = find_nodes(unit, NodeKind::Assign)[0];
  CHECK(facts.names(*stmt).reads == names_used(*stmt, unit).reads);
  const auto* call = find_nodes(unit, NodeKind::Call)[0];
  CHECK(facts.purity(*call) == classify_purity(*call, unit));
  CHECK(facts.purity(*call) == Purity::Impure);
}

TEST_CASE("reads under a later loop that rebinds the name do not escape") {
  const std::string head = "def f(xs):\n    x = 1\n    for x in xs:\n        print(x)\n";
  const auto u1 = parse(head);
  CHECK_FALSE(escapes_region("x", find_nodes(u1, NodeKind::Assign)[0]->span, u1));
  const auto u2 = parse(head + "    else:\n        print(x)\n");
  CHECK(escapes_region("x", find_nodes(u2, NodeKind::Assign)[0]->span, u2));
  const auto u3 = parse("def f(xs):\n    x = 1\n    for x in g(x):\n        pass\n");
  CHECK(escapes_region("x", find_nodes(u3, NodeKind::Assign)[0]->span, u3));
  const auto u4 = parse("def f(xs):\n    x = 1\n    for x, y in xs:\n        print(x)\n");
  CHECK_FALSE(escapes_region("x", find_nodes(u4, NodeKind::Assign)[0]->span, u4));
}
