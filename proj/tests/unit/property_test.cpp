#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "pyidiom/bench.hpp"
#include "pyidiom/idioms.hpp"
#include "support.hpp"

using namespace pyidiom;

namespace {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin() { return below(2) == 0; }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  std::string name() { return pick(names_) + std::to_string(below(3)); }
  std::string literal() {
    switch (below(4)) {
      case 0: return std::to_string(below(100));
      case 1: return "'" + pick(names_) + "'";
      case 2: return coin() ? "None" : "True";
      default: return "(" + std::to_string(below(9)) + ", " + std::to_string(below(9)) + ")";
    }
  }
  std::string trivia() {
    switch (below(5)) {
      case 0: return "  # " + pick(names_);
      case 1: return "   ";
      default: return "";
    }
  }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::vector<std::string> names_{"alpha", "beta", "gamma", "delta", "eps", "zeta"};
};

// One anti-idiomatic fragment inside `def f(xs):`, driven with a fixed
// argument so that the interpreter can compare versions.
std::string fragment(Gen& g, int id) {
  const std::string v = "v" + std::to_string(id);
  switch (g.below(10)) {
    case 0:
      return "    " + v + " = []\n    for x in xs:\n        if x % " + std::to_string(g.below(3) + 2) + " == 0:\n            " + v +
             ".append(x + " + std::to_string(g.below(9)) + ")\n    print(" + v + ")\n";
    case 1:
      return "    " + v + " = {}\n    for x in xs:\n        " + v + "[x] = x * " + std::to_string(g.below(5)) + "\n    print(" +
             v + ")\n";
    case 2:
      return "    " + v + " = set()\n    for x in xs:\n        " + v + ".add(x % " + std::to_string(g.below(4) + 1) +
             ")\n    print(sorted(" + v + "))\n";
    case 3:
      return "    for p in zip(xs, xs):\n        a = p[0]\n        b = p[1]\n        print(a - b)\n";
    case 4:
      return "    if len(xs) > " + std::to_string(g.below(3)) + " and " + std::to_string(g.below(3)) +
             " < len(xs) - 1 and len(xs) - 1 < 9:\n        print('in range')\n";
    case 5:
      return "    print(\"" + g.name() + " %s and %r\" % (len(xs), xs[:1]))\n";
    case 6:
      return "    " + v + "a = " + g.literal() + "\n    " + v + "b = " + g.literal() + g.trivia() + "\n    print(" + v + "a, " +
             v + "b)\n";
    case 7:
      return "    " + v + " = (1, 2, 3)\n    print(" + v + "[0], " + v + "[1], " + v + "[2])\n";
    case 8:
      return "    if len(xs) == 0:\n        print('empty')\n    while len(xs) != 0:\n        xs = xs[1:]\n";
    default:
      return "    found = False\n    for x in xs:\n        if x == " + std::to_string(g.below(12)) +
             ":\n            found = True\n            break\n    if not found:\n        print('absent')\n";
  }
}

std::string program(Gen& g) {
  std::string body;
  const std::size_t n = 1 + g.below(4);
  for (std::size_t i = 0; i < n; ++i) body += fragment(g, static_cast<int>(i));
  return "def f(xs):\n" + body + "\n\nf(list(range(" + std::to_string(g.below(10)) + ")))\n";
}

}  // namespace

TEST_CASE("apply is associative over disjoint plans") {
  Gen g(1);
  for (int round = 0; round < 300; ++round) {
    std::string text;
    const std::size_t len = 10 + g.below(60);
    for (std::size_t i = 0; i < len; ++i) text += static_cast<char>('a' + g.below(26));
    std::vector<std::size_t> cuts;
    for (std::size_t i = 0, n = 2 * g.below(6); i < n; ++i) cuts.push_back(g.below(len + 1));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (cuts.size() % 2) cuts.pop_back();
    std::vector<RewritePlan> plans;
    for (std::size_t i = 0; i + 1 < cuts.size(); i += 2) {
      RewritePlan p;
      p.edits.push_back(TextEdit{Span{cuts[i], cuts[i + 1]}, std::string(g.below(4), 'X')});
      p.provenance = Provenance{"p" + std::to_string(i), p.edits[0].span, 1};
      plans.push_back(p);
    }
    const std::string all = pyidiom::apply(text, plans);

    auto shuffled = plans;
    std::shuffle(shuffled.begin(), shuffled.end(), g.rng());
    CHECK(pyidiom::apply(text, shuffled) == all);

    // Applying a suffix first does not disturb the offsets of the prefix.
    const std::size_t k = plans.empty() ? 0 : g.below(plans.size() + 1);
    const std::vector<RewritePlan> head(plans.begin(), plans.begin() + static_cast<std::ptrdiff_t>(k));
    const std::vector<RewritePlan> tail(plans.begin() + static_cast<std::ptrdiff_t>(k), plans.end());
    CHECK(pyidiom::apply(pyidiom::apply(text, tail), head) == all);

    // Merging plans into one leaves the result unchanged.
    RewritePlan merged;
    for (const auto& p : plans) merged.edits.insert(merged.edits.end(), p.edits.begin(), p.edits.end());
    CHECK(pyidiom::apply(text, std::vector<RewritePlan>{merged}) == all);

    // Bytes outside every span survive verbatim.
    std::size_t prev = 0;
    std::size_t out_pos = 0;
    for (const auto& p : plans) {
      const Span s = p.edits[0].span;
      CHECK(all.compare(out_pos, s.start - prev, text, prev, s.start - prev) == 0);
      out_pos += s.start - prev + p.edits[0].replacement.size();
      prev = s.end;
    }
    CHECK(all.substr(out_pos) == text.substr(prev));
  }
}

TEST_CASE("reindent round-trips") {
  Gen g(2);
  for (int round = 0; round < 200; ++round) {
    std::string block;
    for (std::size_t i = 0, n = 1 + g.below(6); i < n; ++i) {
      if (g.below(5) == 0) {
        block += "\n";
        continue;
      }
      block += std::string(4 * g.below(3), ' ') + g.name() + " = " + g.literal() + "\n";
    }
    const int k = static_cast<int>(1 + g.below(3));
    CHECK(reindent(reindent(block, k, "    "), -k, "    ") == block);
  }
}

TEST_CASE("generated programs round-trip through the parser") {
  Gen g(3);
  for (int round = 0; round < 200; ++round) {
    std::string text = g.coin() ? "# generated\n" : "";
    text += program(g);
    if (g.coin()) text += "\n\n" + g.name() + " = [\n    " + g.literal() + ",  # item\n]\n";
    CAPTURE(text);
    CHECK(serialize(parse(text)) == text);
  }
}

TEST_CASE("engine output parses, is idempotent and preserves behaviour on generated programs") {
  Gen g(4);
  std::size_t rewritten = 0;
  for (int round = 0; round < 40; ++round) {
    const std::string text = program(g);
    const auto report = detect_all(parse(text), kAllIdioms);
    CAPTURE(text);
    CAPTURE(report.refactored_text);
    REQUIRE_NOTHROW(parse(report.refactored_text));
    rewritten += report.total();
    for (IdiomKind k : kAllIdioms) {
      CAPTURE(to_string(k));
      const auto once = refactor_text(text, k);
      const auto twice = refactor_text(once.refactored_text, k);
      CHECK(twice.total() == 0);
    }
    CHECK(testing::python_stdout(text) == testing::python_stdout(report.refactored_text));
  }
  CHECK(rewritten > 40);
}

TEST_CASE("comparison trichotomy on random counts") {
  Gen g(5);
  for (int round = 0; round < 100; ++round) {
    std::vector<bench::MethodCount> m;
    for (std::size_t i = 0, n = g.below(50); i < n; ++i) {
      m.push_back({"m" + std::to_string(i), kAllIdioms[g.below(12)], static_cast<long>(g.below(4)),
                   static_cast<long>(1 + g.below(3))});
    }
    const auto t = bench::compare_counts(m);
    CHECK(t.totals.trichotomy_holds());
    CHECK(t.totals.methods == static_cast<long>(m.size()));
    for (const auto& r : t.rows) {
      CHECK(r.trichotomy_holds());
      CHECK(r.a_zero <= r.b_more);
    }
  }
}

TEST_CASE("largest remainder allocations sum to n and stay within one of the quota") {
  Gen g(6);
  for (int round = 0; round < 300; ++round) {
    std::vector<long> w;
    for (std::size_t i = 0, k = 1 + g.below(12); i < k; ++i) w.push_back(static_cast<long>(g.below(50)));
    if (std::accumulate(w.begin(), w.end(), 0L) == 0) w[0] = 1;
    const std::size_t n = g.below(200);
    const auto a = bench::largest_remainder(w, n);
    CHECK(std::accumulate(a.begin(), a.end(), std::size_t{0}) == n);
    const double total = static_cast<double>(std::accumulate(w.begin(), w.end(), 0L));
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double quota = static_cast<double>(n) * static_cast<double>(w[i]) / total;
      CHECK(static_cast<double>(a[i]) >= std::floor(quota) - 1e-9);
      CHECK(static_cast<double>(a[i]) <= std::floor(quota) + 1.0 + 1e-9);
    }
  }
}
