// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// outcomes that differ from the pinned expectation in kExpectedFailures.

#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pyidiom/bench.hpp"
#include "pyidiom/equivalence.hpp"
#include "pyidiom/idioms.hpp"
#include "pyidiom/llm.hpp"

namespace fs = std::filesystem;
using namespace pyidiom;
using Clock = std::chrono::steady_clock;

namespace {

// Criteria that cannot be met as written, with the reason; see README.
const std::set<int> kExpectedFailures = {2};

constexpr double kRelativeIncreaseTarget = 28.8;  // percent
constexpr double kRelativeIncreaseTolerance = 0.05;
constexpr double kRateTargetA = 90.7;  // percent
constexpr double kRateTargetB = 76.8;
constexpr double kRateTolerance = 0.1;
constexpr double kReferenceBudgetSeconds = 1.0;
constexpr double kCorpusBudgetSeconds = 60.0;
constexpr std::size_t kMinCorpusPairs = 30;
constexpr std::size_t kSampleSize = 120;
constexpr std::uint64_t kSampleSeed = 2024;
constexpr long kStratumTolerance = 1;

// methods, count_a, count_b, equals, a_more, b_more, a_zero in catalogue order.
constexpr std::array<std::array<long, 7>, 12> kComparisonRows = {{
    {100, 205, 131, 63, 36, 1, 0},
    {100, 197, 110, 63, 37, 0, 0},
    {100, 166, 132, 56, 32, 12, 6},
    {100, 285, 225, 76, 23, 1, 0},
    {100, 176, 157, 55, 26, 18, 1},
    {100, 145, 127, 67, 21, 12, 2},
    {100, 287, 161, 43, 54, 3, 1},
    {100, 129, 113, 78, 15, 6, 0},
    {100, 155, 132, 82, 14, 4, 0},
    {101, 157, 120, 68, 31, 2, 0},
    {100, 223, 227, 58, 25, 17, 1},
    {100, 140, 123, 78, 18, 4, 0},
}};
constexpr std::array<long, 7> kComparisonTotals = {1201, 2265, 1758, 787, 332, 80, 11};
// Reviewed methods per idiom in the manual correctness study.
constexpr std::array<long, 12> kReviewedStrata = {10, 9, 9, 15, 10, 8, 13, 8, 9, 8, 13, 8};
constexpr std::array<long, 6> kReviewTotals = {238, 164, 216, 126, 22, 38};

fs::path root() { return PYIDIOM_SOURCE_DIR; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<fs::path> corpus_files() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(root() / "tests" / "corpus")) {
    if (e.path().extension() == ".py") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome reference_fixtures() {
  const auto start = Clock::now();
  int matched = 0;
  std::ostringstream detail;
  const auto dir = root() / "tests" / "fixtures" / "reference";
  for (const char* name : {"with_video", "truth_fit", "assign_seed", "xor_pages", "repr_callback"}) {
    const std::string base = name;
    const auto report = detect_all(parse(slurp(dir / (base + ".py"))), kAllIdioms);
    const bool same = report.refactored_text == slurp(dir / (base + ".expected.py"));
    if (same) ++matched;
    else detail << base << " differs; ";
  }
  const auto pages = refactor_text(slurp(dir / "xor_pages.py"), IdiomKind::ChainComparison);
  const auto repr = refactor_text(slurp(dir / "repr_callback.py"), IdiomKind::FString);
  const auto truth = refactor_text(slurp(dir / "truth_fit.py"), IdiomKind::TruthValueTest);
  const auto seed = refactor_text(slurp(dir / "assign_seed.py"), IdiomKind::AssignMultiTargets);
  const auto video = refactor_text(slurp(dir / "with_video.py"), IdiomKind::With);
  const bool guards = pages.total() == 0 && repr.refactored_text.find("f\"{body!r}\"") != std::string::npos &&
                      repr.refactored_text.find("{body}") == std::string::npos &&
                      truth.refactored_text.find("assert not new_agent.fit\n") != std::string::npos &&
                      seed.refactored_text.find("_SEED, _K = 43, 10") != std::string::npos &&
                      video.counts.at(IdiomKind::With) == 1;
  if (!guards) detail << "targeted checks failed; ";
  const double elapsed = seconds_since(start);
  detail << matched << "/5 exact, xor sites " << pages.total() << ", " << elapsed << " s (budget " << kReferenceBudgetSeconds
         << " s)";
  return {matched == 5 && guards && elapsed < kReferenceBudgetSeconds, detail.str()};
}

Outcome comparison_table() {
  const auto rows = bench::parse_csv(slurp(root() / "tests" / "fixtures" / "table2_methods.csv"));
  std::vector<bench::MethodCount> methods;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    methods.push_back({rows[i][0], *parse_idiom(rows[i][1]), std::stol(rows[i][2]), std::stol(rows[i][3])});
  }
  const auto table = bench::compare_counts(methods);
  const auto as_array = [](const bench::ComparisonRow& r) {
    return std::array<long, 7>{r.methods, r.count_a, r.count_b, r.equals, r.a_more, r.b_more, r.a_zero};
  };
  static constexpr std::array<const char*, 7> kColumns = {"methods", "count_a", "count_b", "equals",
                                                          "a_more",  "b_more",  "a_zero"};
  std::ostringstream mismatches;
  int bad = 0;
  bool trichotomy = table.totals.trichotomy_holds();
  for (std::size_t i = 0; i < 12; ++i) {
    const bool present = i < table.rows.size() && table.rows[i].idiom == kAllIdioms[i];
    const auto got = present ? as_array(table.rows[i]) : std::array<long, 7>{};
    if (present) trichotomy = trichotomy && table.rows[i].trichotomy_holds();
    for (std::size_t c = 0; c < 7; ++c) {
      if (got[c] != kComparisonRows[i][c]) {
        ++bad;
        mismatches << to_string(kAllIdioms[i]) << '.' << kColumns[c] << '=' << got[c] << "!=" << kComparisonRows[i][c]
                   << ' ';
      }
    }
  }
  const auto totals = as_array(table.totals);
  for (std::size_t c = 0; c < 7; ++c) {
    if (totals[c] != kComparisonTotals[c]) {
      ++bad;
      mismatches << "total." << kColumns[c] << '=' << totals[c] << "!=" << kComparisonTotals[c] << ' ';
    }
  }
  const double increase = 100.0 * bench::relative_increase(table.totals.count_a, table.totals.count_b);
  const bool increase_ok = std::abs(increase - kRelativeIncreaseTarget) <= kRelativeIncreaseTolerance;
  std::ostringstream detail;
  detail << bad << " cell mismatches " << (bad ? "(" + mismatches.str() + ")" : std::string()) << "; trichotomy "
         << (trichotomy ? "holds" : "broken") << "; increase " << increase << "% (target " << kRelativeIncreaseTarget
         << " +/- " << kRelativeIncreaseTolerance << ")";
  return {bad == 0 && trichotomy && increase_ok, detail.str()};
}

Outcome correctness_table() {
  std::ifstream in(root() / "tests" / "fixtures" / "table3_verdicts.jsonl");
  const auto table = bench::tally_verdicts(bench::read_verdicts(in));
  const auto& t = table.totals;
  const std::array<long, 6> got = {t.a_ref, t.b_ref, t.a_correct, t.b_correct, t.a_wrong, t.b_wrong};
  const double rate_a = 100.0 * t.a_rate();
  const double rate_b = 100.0 * t.b_rate();
  const bool ok = got == kReviewTotals && std::abs(rate_a - kRateTargetA) <= kRateTolerance &&
                  std::abs(rate_b - kRateTargetB) <= kRateTolerance;
  std::ostringstream detail;
  detail << "totals (" << got[0] << ", " << got[1] << ", " << got[2] << ", " << got[3] << ", " << got[4] << ", " << got[5]
         << "); rates " << rate_a << "% / " << rate_b << "% (targets " << kRateTargetA << " / " << kRateTargetB
         << " +/- " << kRateTolerance << ")";
  return {ok, detail.str()};
}

Outcome idempotence() {
  std::size_t checks = 0;
  std::ostringstream failures;
  int bad = 0;
  const auto files = corpus_files();
  for (const auto& f : files) {
    const std::string text = slurp(f);
    for (IdiomKind k : kAllIdioms) {
      const auto once = refactor_text(text, k);
      const auto twice = refactor_text(once.refactored_text, k);
      ++checks;
      if (twice.total() != 0 || twice.refactored_text != once.refactored_text) {
        ++bad;
        failures << f.filename().string() << ':' << to_string(k) << ' ';
      }
    }
  }
  std::ostringstream detail;
  detail << checks - bad << '/' << checks << " (file, idiom) pairs idempotent over " << files.size() << " files";
  if (bad) detail << "; failing: " << failures.str();
  return {bad == 0 && files.size() >= kMinCorpusPairs, detail.str()};
}

Outcome parse_validity() {
  std::size_t outputs = 0;
  std::size_t valid = 0;
  for (const auto& f : corpus_files()) {
    const std::string text = slurp(f);
    std::vector<std::string> produced;
    for (IdiomKind k : kAllIdioms) produced.push_back(refactor_text(text, k).refactored_text);
    produced.push_back(detect_all(parse(text), kAllIdioms).refactored_text);
    for (const auto& p : produced) {
      ++outputs;
      try {
        parse(p);
        ++valid;
      } catch (const SyntaxError&) {
      }
    }
  }
  std::ostringstream detail;
  detail << valid << '/' << outputs << " outputs re-parse";
  return {outputs > 0 && valid == outputs, detail.str()};
}

Outcome behaviour() {
  std::vector<equivalence::Pair> pairs;
  std::size_t rewritten = 0;
  for (const auto& f : corpus_files()) {
    const std::string text = slurp(f);
    const auto report = detect_all(parse(text), kAllIdioms);
    rewritten += report.total();
    pairs.push_back({f.stem().string(), text, report.refactored_text});
  }
  const auto start = Clock::now();
  const auto summary = equivalence::check_corpus(pairs, {});
  const double elapsed = seconds_since(start);

  const std::string plant = slurp(root() / "tests" / "fixtures" / "aliasing_plant.py");
  EngineOptions unsafe;
  unsafe.disable_mutability_guard = true;
  const auto planted = refactor_text(plant, IdiomKind::ChainAssignSameValue, unsafe);
  const auto plant_status = equivalence::check(plant, planted.refactored_text, {}, "plant").status;
  const auto guarded = refactor_text(plant, IdiomKind::ChainAssignSameValue);

  const bool ok = pairs.size() >= kMinCorpusPairs && summary.count(equivalence::Status::Equivalent) == pairs.size() &&
                  summary.count(equivalence::Status::Divergent) == 0 &&
                  summary.count(equivalence::Status::Nondeterministic) == 0 && elapsed < kCorpusBudgetSeconds &&
                  planted.total() == 1 && plant_status == equivalence::Status::Divergent && guarded.total() == 0;
  std::ostringstream detail;
  detail << pairs.size() << " pairs (" << rewritten << " rewrites): ";
  for (const auto& [status, n] : summary.counts) detail << to_string(status) << '=' << n << ' ';
  detail << "in " << elapsed << " s (budget " << kCorpusBudgetSeconds << " s); plant without guard "
         << to_string(plant_status) << ", with guard " << guarded.total() << " sites";
  return {ok, detail.str()};
}

Outcome prompt_fidelity() {
  const std::string code = slurp(root() / "tests" / "fixtures" / "reference" / "with_video.py");
  const std::string idiom = "PEP 343 - The 'with' Statement";
  const std::string system =
      "You are a software developer, skilled in writing Python source code and refactoring Python code using " + idiom;
  const std::string user = "Refactor the code using the " + idiom +
                           " idiom, and provide the refactored Python code along with the number of " + idiom +
                           " refactorings you have made: " + code;
  const auto prompt = llm::build_prompt(IdiomKind::With, code);
  const llm::Parameters defaults;
  const bool params = defaults.temperature == 1.0 && defaults.top_p == 1.0 && defaults.max_tokens == 4000;
  std::ostringstream detail;
  detail << "system " << (prompt.system == system ? "identical" : "differs") << ", user "
         << (prompt.user == user ? "identical" : "differs") << ", defaults (" << defaults.temperature << ", "
         << defaults.top_p << ", " << defaults.max_tokens << ")";
  return {prompt.system == system && prompt.user == user && params, detail.str()};
}

Outcome replay_determinism() {
  const fs::path tmp = fs::temp_directory_path() / ("pyidiom-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  const auto fixtures = root() / "tests" / "fixtures" / "bench";
  std::vector<int> codes;
  for (const char* name : {"first.csv", "second.csv"}) {
    const std::string cmd = std::string("'") + PYIDIOM_CLI_PATH + "' evaluate --dataset '" +
                            (fixtures / "dataset.jsonl").string() + "' --source llm --provider replay --replay-dir '" +
                            (fixtures / "replay").string() + "' --out '" + (tmp / name).string() + "' 2>/dev/null";
    codes.push_back(std::system(cmd.c_str()));
  }
  const std::string a = slurp(tmp / "first.csv");
  const std::string b = slurp(tmp / "second.csv");
  fs::remove_all(tmp);
  std::ostringstream detail;
  detail << "exit codes " << codes[0] << ", " << codes[1] << "; " << a.size() << " vs " << b.size() << " bytes, "
         << (a == b ? "identical" : "different");
  return {codes[0] == 0 && codes[1] == 0 && !a.empty() && a == b, detail.str()};
}

Outcome proportional_sampling() {
  std::vector<bench::Stratum> strata;
  for (std::size_t i = 0; i < 12; ++i) {
    bench::Stratum s{kAllIdioms[i], {}, kComparisonRows[i][1] + kComparisonRows[i][2]};
    for (long m = 0; m < kComparisonRows[i][0]; ++m) s.method_ids.push_back(std::to_string(i) + "-" + std::to_string(m));
    strata.push_back(std::move(s));
  }
  const auto sample = bench::sample_for_review(strata, kSampleSize, kSampleSeed);
  std::ostringstream detail;
  bool within = sample.size() == 12;
  std::size_t fstring = 0;
  std::size_t largest_other = 0;
  std::size_t total = 0;
  detail << "allocation [";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const std::size_t n = sample[i].method_ids.size();
    total += n;
    detail << (i ? "," : "") << n;
    within = within && std::labs(static_cast<long>(n) - kReviewedStrata[i]) <= kStratumTolerance;
    if (sample[i].idiom == IdiomKind::FString) fstring = n;
    else largest_other = std::max(largest_other, n);
  }
  detail << "] vs reviewed [";
  for (std::size_t i = 0; i < 12; ++i) detail << (i ? "," : "") << kReviewedStrata[i];
  detail << "] (+/- " << kStratumTolerance << "); fstring " << fstring << " vs max other " << largest_other;
  return {within && total == kSampleSize && fstring >= largest_other, detail.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria = {
      {1, "reference fixture transformations", reference_fixtures},
      {2, "comparison table arithmetic", comparison_table},
      {3, "correctness table arithmetic", correctness_table},
      {4, "idempotence over corpus", idempotence},
      {5, "parse validity over corpus", parse_validity},
      {6, "behaviour preservation", behaviour},
      {7, "prompt fidelity", prompt_fidelity},
      {8, "replay determinism", replay_determinism},
      {9, "proportional sampling", proportional_sampling},
  };
  int unexpected = 0;
  int passed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool expected_failure = kExpectedFailures.count(c.id) > 0;
    if (o.pass) ++passed;
    if (o.pass == expected_failure) ++unexpected;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
              << (expected_failure && !o.pass ? " [expected: unattainable as specified]" : "")
              << (expected_failure && o.pass ? " [unexpected pass: update kExpectedFailures]" : "") << '\n';
  }
  std::cout << passed << '/' << criteria.size() << " criteria pass; " << unexpected << " unexpected outcome(s)\n";
  return unexpected;
}
