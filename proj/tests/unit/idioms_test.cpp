#include "doctest.h"
#include "pyidiom/idioms.hpp"
#include "support.hpp"

using namespace pyidiom;

namespace {

struct Outcome {
  std::size_t count;
  std::string text;
};

Outcome run(IdiomKind kind, const std::string& code, const EngineOptions& options = {}) {
  const auto report = refactor_text(code, kind, options);
  return {report.counts.at(kind), report.refactored_text};
}

// Refactors `code` and checks the rewrite against `expected` and, with
// `driver` appended, against the original under the interpreter.
void expect_rewrite(IdiomKind kind, const std::string& code, const std::string& expected, const std::string& driver,
                    std::size_t count = 1) {
  const auto out = run(kind, code);
  CHECK(out.count == count);
  CHECK(out.text == expected);
  if (!driver.empty()) CHECK(testing::python_stdout(code + driver) == testing::python_stdout(out.text + driver));
}

void expect_none(IdiomKind kind, const std::string& code, const EngineOptions& options = {}) {
  const auto out = run(kind, code, options);
  CHECK(out.count == 0);
  CHECK(out.text == code);
}

}  // namespace

TEST_CASE("catalogue") {
  CHECK(kAllIdioms.size() == 12);
  std::vector<int> peps;
  for (IdiomKind k : kAllIdioms) {
    if (idiom_info(k).pep) peps.push_back(*idiom_info(k).pep);
    CHECK(parse_idiom(to_string(k)) == k);
  }
  CHECK(peps == std::vector<int>{202, 498, 448, 343, 274});
  CHECK(parse_idiom("list_comp") == IdiomKind::ListComp);
  CHECK(parse_idiom("chain_ass") == IdiomKind::ChainAssignSameValue);
  CHECK(parse_idiom("Truth Value Test") == IdiomKind::TruthValueTest);
  CHECK_FALSE(parse_idiom("walrus").has_value());
}

TEST_CASE("list comprehension") {
  expect_rewrite(IdiomKind::ListComp,
                 "def f(xs):\n    r = []\n    for x in xs:\n        if x > 0:\n            r.append(x*2)\n    return r\n",
                 "def f(xs):\n    r = [x*2 for x in xs if x > 0]\n    return r\n", "print(f([-1, 0, 1, 2]))\n");
  expect_none(IdiomKind::ListComp, "def f(xs):\n    r = [x for x in xs]\n    return r\n");
  expect_none(IdiomKind::ListComp,
              "def f(xs):\n    r = []\n    for x in xs:\n        log(x)\n        r.append(x)\n    return r\n");
  expect_none(IdiomKind::ListComp,
              "def f(xs):\n    r = []\n    for x in xs:\n        r.append(len(r))\n    return r\n");
  expect_none(IdiomKind::ListComp,
              "def f(xs):\n    r = []\n    for x in xs:\n        r.append(x)\n    else:\n        pass\n    return r\n");
}

TEST_CASE("dict comprehension") {
  expect_rewrite(IdiomKind::DictComp,
                 "def f(items):\n    d = {}\n    for k, v in items:\n        d[k] = v*2\n    return d\n",
                 "def f(items):\n    d = {k: v*2 for k, v in items}\n    return d\n",
                 "print(f([('a', 1), ('b', 2)]))\n");
  expect_none(IdiomKind::DictComp, "def f(items):\n    return {k: v for k, v in items}\n");
  expect_none(IdiomKind::DictComp,
              "def f(items):\n    d = {}\n    for k, v in items:\n        if v:\n            d[k] = v\n"
              "        else:\n            d[v] = k\n    return d\n");
}

TEST_CASE("set comprehension") {
  expect_rewrite(IdiomKind::SetComp, "def f(xs):\n    s = set()\n    for x in xs:\n        s.add(x % 3)\n    return s\n",
                 "def f(xs):\n    s = {x % 3 for x in xs}\n    return s\n", "print(sorted(f(range(7))))\n");
  expect_none(IdiomKind::SetComp, "def f(xs):\n    return {x for x in xs}\n");
  expect_none(IdiomKind::SetComp,
              "def f(xs):\n    s = set()\n    for x in xs:\n        s.add(x)\n        print(x)\n    return s\n");
}

TEST_CASE("for multiple targets") {
  expect_rewrite(IdiomKind::ForMultiTargets,
                 "def f(pairs):\n    for p in pairs:\n        a = p[0]\n        b = p[1]\n        use(a, b)\n",
                 "def f(pairs):\n    for a, b in pairs:\n        use(a, b)\n",
                 "def use(a, b):\n    print(a, b)\nf([(1, 2), (3, 4)])\n");
  expect_none(IdiomKind::ForMultiTargets, "def f(pairs):\n    for a, b in pairs:\n        use(a, b)\n");
  expect_none(IdiomKind::ForMultiTargets,
              "def f(pairs):\n    for p in pairs:\n        a = p[0]\n        b = p[1]\n        p = None\n        use(a, b)\n");
  expect_none(IdiomKind::ForMultiTargets,
              "def f(pairs):\n    for p in pairs:\n        a = p[0]\n        b = p[2]\n        use(a, b)\n");
}

TEST_CASE("chain comparison") {
  const std::string oracle =
      "for a in range(3):\n    for b in range(3):\n        for c in range(3):\n            print(f(a, b, c))\n";
  expect_rewrite(IdiomKind::ChainComparison, "def f(a, b, c):\n    if a < b and b < c:\n        return 1\n    return 0\n",
                 "def f(a, b, c):\n    if a < b < c:\n        return 1\n    return 0\n", oracle);
  expect_none(IdiomKind::ChainComparison, "def f(a, b):\n    if (a is None) ^ (b is None):\n        return 1\n");
  expect_none(IdiomKind::ChainComparison, "def f(a, b, c):\n    if a < b < c:\n        return 1\n");
  expect_none(IdiomKind::ChainComparison, "def f(a, b, c):\n    if a < b or b < c:\n        return 1\n");
  expect_none(IdiomKind::ChainComparison, "def f(a, c):\n    if a < g() and g() < c:\n        return 1\n");
  expect_none(IdiomKind::ChainComparison, "def f(a, b, c):\n    if a < b and b > c:\n        return 1\n");
}

TEST_CASE("xor of None checks yields no chain comparison site") {
  const auto code = testing::slurp(testing::fixture("reference/xor_pages.py"));
  expect_none(IdiomKind::ChainComparison, code);
}

TEST_CASE("fstring") {
  expect_rewrite(IdiomKind::FString, "def f(body):\n    print(\"%r\" % body)\n", "def f(body):\n    print(f\"{body!r}\")\n",
                 "f('x')\nf(1)\n");
  expect_rewrite(IdiomKind::FString, "def f(name):\n    return \"Hello %s\" % name\n",
                 "def f(name):\n    return f\"Hello {name}\"\n", "print(f('world'))\n");
  expect_rewrite(IdiomKind::FString, "def f(a, n):\n    return \"{} has {}\".format(a, n)\n",
                 "def f(a, n):\n    return f\"{a} has {n}\"\n", "print(f('x', 3))\n");
  expect_none(IdiomKind::FString, "def f(name):\n    return f\"Hello {name}\"\n");
  expect_none(IdiomKind::FString, "def f(a):\n    return \"%s %s\" % (a,)\n");
  expect_none(IdiomKind::FString, "def f(m):\n    return \"%(k)s\" % m\n");
}

TEST_CASE("percent-r keeps repr semantics") {
  const auto out = run(IdiomKind::FString, testing::slurp(testing::fixture("reference/repr_callback.py")));
  CHECK(out.count == 1);
  CHECK(out.text.find("{body!r}") != std::string::npos);
  CHECK(out.text.find("{body}") == std::string::npos);
}

TEST_CASE("assign multiple targets") {
  expect_rewrite(IdiomKind::AssignMultiTargets, "_SEED = 43\n_K = 10\n", "_SEED, _K = 43, 10\n", "print(_SEED, _K)\n");
  expect_none(IdiomKind::AssignMultiTargets, "a = 1\nb = a + 1\n");
  expect_rewrite(IdiomKind::AssignMultiTargets, "a = 1\nb = 'x'\nc = None\nd = 2.5\n", "a, b, c, d = 1, 'x', None, 2.5\n",
                 "print(a, b, c, d)\n");
}

TEST_CASE("star in call") {
  expect_rewrite(IdiomKind::StarInCall, "def g(f):\n    args = (1, 2, 3)\n    f(args[0], args[1], args[2])\n",
                 "def g(f):\n    args = (1, 2, 3)\n    f(*args)\n", "g(print)\n");
  expect_none(IdiomKind::StarInCall, "def g(f):\n    args = (1, 2, 3)\n    f(args[0], args[2])\n");
  expect_none(IdiomKind::StarInCall, "def g(f, args):\n    f(*args)\n");
  expect_none(IdiomKind::StarInCall, "def g(f, args):\n    f(args[0], args[1])\n");
  expect_none(IdiomKind::StarInCall, "def g(f):\n    args = [1, 2, 3]\n    args = [4]\n    f(args[0], args[1], args[2])\n");
}

TEST_CASE("truth value test") {
  expect_rewrite(IdiomKind::TruthValueTest, "def f(new_agent):\n    assert new_agent.fit == 0\n",
                 "def f(new_agent):\n    assert not new_agent.fit\n", "");
  expect_rewrite(IdiomKind::TruthValueTest, "def f(xs):\n    if len(xs) == 0:\n        return 'empty'\n    return 'full'\n",
                 "def f(xs):\n    if not xs:\n        return 'empty'\n    return 'full'\n", "print(f([]), f([1]))\n");
  expect_rewrite(IdiomKind::TruthValueTest, "def f(xs):\n    while len(xs) > 0:\n        xs.pop()\n",
                 "def f(xs):\n    while xs:\n        xs.pop()\n", "a = [1, 2]\nf(a)\nprint(a)\n");
  expect_none(IdiomKind::TruthValueTest, "def f(x):\n    if x == compute():\n        pass\n");
  expect_none(IdiomKind::TruthValueTest, "def f(x):\n    y = (x == 0)\n    return y\n");
  expect_none(IdiomKind::TruthValueTest, "def f(x):\n    if x.y() == 0:\n        pass\n");
}

TEST_CASE("truth value test on None, default and strict") {
  const std::string code = "def f(x):\n    if x == None:\n        return 1\n";
  CHECK(run(IdiomKind::TruthValueTest, code).text == "def f(x):\n    if not x:\n        return 1\n");
  EngineOptions strict;
  strict.strict_none = true;
  CHECK(run(IdiomKind::TruthValueTest, code, strict).text == "def f(x):\n    if x is None:\n        return 1\n");
}

TEST_CASE("loop else") {
  const std::string code =
      "def f(xs, target):\n"
      "    found = False\n"
      "    for x in xs:\n"
      "        if x == target:\n"
      "            found = True\n"
      "            break\n"
      "    if not found:\n"
      "        handle()\n";
  const std::string expected =
      "def f(xs, target):\n"
      "    for x in xs:\n"
      "        if x == target:\n"
      "            break\n"
      "    else:\n"
      "        handle()\n";
  expect_rewrite(IdiomKind::LoopElse, code, expected, "def handle():\n    print('missing')\nf([1, 2], 2)\nf([1, 2], 3)\n");
  expect_none(IdiomKind::LoopElse, "def f(xs):\n    for x in xs:\n        break\n    else:\n        pass\n");
  expect_none(IdiomKind::LoopElse, code + "    return found\n");
}

TEST_CASE("with statement") {
  const auto video = testing::slurp(testing::fixture("reference/with_video.py"));
  const auto expected = testing::slurp(testing::fixture("reference/with_video.expected.py"));
  const auto out = run(IdiomKind::With, video);
  CHECK(out.count == 1);
  CHECK(out.text == expected);
  CHECK(out.text.find("with open('./test_data/test_video.mp4', 'rb') as file_data:") != std::string::npos);
  expect_none(IdiomKind::With, "def f(p):\n    with open(p) as fh:\n        return fh.read()\n");
  expect_none(IdiomKind::With, "def f(p):\n    fh = open(p)\n    fh.readline()\n    return fh\n");
  expect_rewrite(IdiomKind::With, "def f(p):\n    fh = open(p)\n    data = fh.read()\n    fh.close()\n    return data\n",
                 "def f(p):\n    with open(p) as fh:\n        data = fh.read()\n    return data\n", "");
}

TEST_CASE("chain assign same value") {
  expect_rewrite(IdiomKind::ChainAssignSameValue, "a = 0\nb = 0\n", "a = b = 0\n", "print(a, b)\n");
  expect_none(IdiomKind::ChainAssignSameValue, "a = []\nb = []\n");
  expect_none(IdiomKind::ChainAssignSameValue, "a = b = 0\n");
  expect_none(IdiomKind::ChainAssignSameValue, "a = 0\na = 0\n");
}

TEST_CASE("mutability guard can be switched off for planting") {
  EngineOptions options;
  options.disable_mutability_guard = true;
  CHECK(run(IdiomKind::ChainAssignSameValue, "a = []\nb = []\n", options).text == "a = b = []\n");
}

TEST_CASE("guards are reported for refused candidates") {
  const auto unit = parse("a = []\nb = []\n");
  SafetyFacts facts(unit);
  const auto candidates = detect_candidates(IdiomKind::ChainAssignSameValue, unit, facts);
  REQUIRE(candidates.size() == 1);
  CHECK_FALSE(candidates[0].site.passed());
  REQUIRE(candidates[0].site.first_failure() != nullptr);
  CHECK(candidates[0].plan.edits.empty());
}

TEST_CASE("detect_all") {
  const auto video = parse(testing::slurp(testing::fixture("reference/with_video.py")));
  const std::array with{IdiomKind::With};
  const auto r1 = detect_all(video, with);
  CHECK(r1.counts.at(IdiomKind::With) == 1);
  CHECK(r1.total() == 1);

  const std::string idiomatic = "def f(xs):\n    return [x for x in xs if x]\n";
  const auto r2 = detect_all(parse(idiomatic), kAllIdioms);
  CHECK(r2.total() == 0);
  CHECK(r2.counts.size() == 12);
  CHECK(r2.refactored_text == idiomatic);

  const std::string mixed =
      "def f(xs, name):\n"
      "    r = []\n"
      "    for x in xs:\n"
      "        r.append(x + 1)\n"
      "    return r, \"hi %s\" % name\n";
  const auto r3 = detect_all(parse(mixed), kAllIdioms);
  CHECK(r3.counts.at(IdiomKind::ListComp) == 1);
  CHECK(r3.counts.at(IdiomKind::FString) == 1);
  CHECK(r3.total() == 2);
  const std::string driver = "print(f([1, 2], 'x'))\n";
  CHECK(testing::python_stdout(mixed + driver) == testing::python_stdout(r3.refactored_text + driver));
}

TEST_CASE("cross-idiom overlap goes to the earlier idiom") {
  // Both chain-assign and assign-multi-targets want these two lines.
  const std::string code = "a = 0\nb = 0\n";
  const std::array both{IdiomKind::AssignMultiTargets, IdiomKind::ChainAssignSameValue};
  const auto r = detect_all(parse(code), both);
  CHECK(r.counts.at(IdiomKind::AssignMultiTargets) == 1);
  CHECK(r.counts.at(IdiomKind::ChainAssignSameValue) == 0);
  REQUIRE(r.dropped.size() == 1);
  CHECK(r.dropped[0].reason == "overlaps assign_multiple_target");
}

TEST_CASE("count coherence: counts equal applied sites equal passing candidates") {
  for (const auto& entry : std::filesystem::directory_iterator(testing::corpus_dir())) {
    const auto unit = parse(testing::slurp(entry.path()));
    for (IdiomKind k : kAllIdioms) {
      SafetyFacts facts(unit);
      const auto sites = refactor(k, unit, facts);
      const auto report = refactor_text(unit.text(), k);
      CAPTURE(entry.path().string());
      CAPTURE(to_string(k));
      CHECK(report.counts.at(k) == report.applied.size());
      CHECK(report.applied.size() <= sites.size());
      for (const auto& s : sites) CHECK(s.site.passed());
    }
  }
}
