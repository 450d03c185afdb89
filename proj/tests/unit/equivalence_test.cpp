#include "doctest.h"
#include "pyidiom/equivalence.hpp"
#include "pyidiom/idioms.hpp"
#include "support.hpp"

using namespace pyidiom;
using namespace pyidiom::equivalence;

TEST_CASE("list comprehension pair is equivalent") {
  const std::string original = "r = []\nfor x in range(5):\n    r.append(x * x)\nprint(r)\n";
  const std::string refactored = "r = [x * x for x in range(5)]\nprint(r)\n";
  CHECK(check(original, refactored, {}).status == Status::Equivalent);
}

TEST_CASE("aliasing pair diverges") {
  const auto r = check("a = []\nb = []\na.append(1)\nprint(b)\n", "a = b = []\na.append(1)\nprint(b)\n", {});
  CHECK(r.status == Status::Divergent);
  CHECK(r.original[0].out == "[]\n");
  CHECK(r.refactored[0].out == "[1]\n");
  CHECK(r.detail.find("line 1") != std::string::npos);
}

TEST_CASE("sleeping past the limit times out") {
  CheckOptions options;
  options.timeout = std::chrono::milliseconds(500);
  const auto start = std::chrono::steady_clock::now();
  const auto r = check("import time\ntime.sleep(30)\n", "print(1)\n", options);
  CHECK(r.status == Status::Timeout);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
}

TEST_CASE("original failures and nondeterminism are classified") {
  CHECK(check("raise SystemExit(3)\n", "pass\n", {}).status == Status::OriginalFails);
  CHECK(check("import os\nprint(os.urandom(8).hex())\n", "print(1)\n", {}).status == Status::Nondeterministic);
  CHECK(check("print(1)\n", "import os\nprint(os.urandom(8).hex())\n", {}).status == Status::Nondeterministic);
  CHECK(check("print(1)\n", "raise SystemExit(1)\n", {}).status == Status::Divergent);
}

TEST_CASE("scripts run in a scrubbed scratch directory") {
  const auto r = run_script("import os\nprint(os.getcwd() != '" + testing::source_dir().string() +
                                "')\nprint(os.environ.get('PYTHONHASHSEED'))\nprint('HOME' in os.environ)\n",
                            {});
  CHECK(r.out == "True\n0\nTrue\n");
}

TEST_CASE("a missing runner is reported") {
  CheckOptions options;
  options.runner = "/nonexistent/python3";
  CHECK_THROWS_AS(check("print(1)\n", "print(1)\n", options), RunnerMissing);
}

TEST_CASE("corpus summaries") {
  const auto empty = check_corpus({}, {});
  CHECK(empty.count(Status::Equivalent) == 0);
  CHECK(empty.results.empty());

  std::vector<Pair> pairs;
  for (int i = 0; i < 4; ++i) pairs.push_back({"p" + std::to_string(i), "print(1)\n", "print(1)\n"});
  const auto plant = testing::slurp(testing::fixture("aliasing_plant.py"));
  EngineOptions unsafe;
  unsafe.disable_mutability_guard = true;
  const auto planted = refactor_text(plant, IdiomKind::ChainAssignSameValue, unsafe);
  REQUIRE(planted.total() == 1);
  pairs.push_back({"plant", plant, planted.refactored_text});
  const auto s = check_corpus(pairs, {}, 3);
  CHECK(s.count(Status::Equivalent) == 4);
  CHECK(s.count(Status::Divergent) == 1);
  CHECK(s.results.back().method_id == "plant");

  const auto guarded = refactor_text(plant, IdiomKind::ChainAssignSameValue);
  CHECK(guarded.total() == 0);
}

TEST_CASE("pairs load from a directory sorted by id") {
  testing::TempDir dir;
  testing::write_file(dir.path() / "b.original.py", "print(2)\n");
  testing::write_file(dir.path() / "b.refactored.py", "print(2)\n");
  testing::write_file(dir.path() / "a.original.py", "print(1)\n");
  testing::write_file(dir.path() / "a.refactored.py", "print(1)\n");
  const auto pairs = load_pairs(dir.path());
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].method_id == "a");
  testing::write_file(dir.path() / "c.original.py", "print(3)\n");
  CHECK_THROWS(load_pairs(dir.path()));
}
