#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pyidiom/idioms.hpp"

namespace pyidiom::bench {

struct BenchRecord {
  IdiomKind idiom = IdiomKind::ListComp;
  std::string method_id;
  std::string repo;
  std::string original_code;
  std::string benchmark_refactored_code;
  int benchmark_count = 0;
};

class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ParseFailure {
  std::string method_id;
  std::string message;
};

struct Dataset {
  std::vector<BenchRecord> records;
  std::size_t duplicates_removed = 0;
  std::vector<ParseFailure> failures;
};

// JSON Lines, one record per line; blank lines are skipped.
Dataset read_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);
// CSV with the JSONL field names as header.
Dataset load_csv_dataset(const std::filesystem::path& path);
void write_dataset(std::ostream& out, std::span<const BenchRecord> records);

std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);

struct MethodCount {
  std::string method_id;
  IdiomKind idiom = IdiomKind::ListComp;
  long count_a = 0;
  long count_b = 0;
};

struct ComparisonRow {
  std::optional<IdiomKind> idiom;  // empty for the totals row
  long methods = 0;
  long count_a = 0;
  long count_b = 0;
  long equals = 0;
  long a_more = 0;
  long b_more = 0;
  long a_zero = 0;

  bool trichotomy_holds() const { return equals + a_more + b_more == methods; }
  bool operator==(const ComparisonRow&) const = default;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // catalogue order, idioms with methods only
  ComparisonRow totals;
};

ComparisonTable compare_counts(std::span<const MethodCount> per_method);
// a / b - 1, as a fraction.
double relative_increase(long count_a, long count_b);

std::string comparison_csv(const ComparisonTable& table);
std::string comparison_markdown(const ComparisonTable& table, std::string_view label_a = "A",
                                std::string_view label_b = "B");

// Per-method counts of one refactoring source: method_id,idiom,count.
struct SourceCount {
  std::string method_id;
  IdiomKind idiom = IdiomKind::ListComp;
  long count = 0;
};
std::string source_report_csv(std::span<const SourceCount> counts);
std::vector<SourceCount> read_source_report(const std::filesystem::path& path);
// Joins two reports on (idiom, method_id); unmatched methods are dropped.
std::vector<MethodCount> join_reports(std::span<const SourceCount> left, std::span<const SourceCount> right);

class InsufficientPopulation : public std::runtime_error {
 public:
  InsufficientPopulation(IdiomKind idiom, std::size_t wanted, std::size_t available);
};

struct Stratum {
  IdiomKind idiom = IdiomKind::ListComp;
  std::vector<std::string> method_ids;
  long weight = 0;  // refactorings attributed to this idiom
};

std::vector<std::size_t> largest_remainder(std::span<const long> weights, std::size_t n);

struct StratumSample {
  IdiomKind idiom = IdiomKind::ListComp;
  std::vector<std::string> method_ids;
};

std::vector<StratumSample> sample_for_review(std::span<const Stratum> strata, std::size_t n, std::uint64_t seed);

enum class Source { A, B };

struct Verdict {
  std::string method_id;
  IdiomKind idiom = IdiomKind::ListComp;
  Source source = Source::A;
  long refactorings_counted = 0;
  long correct = 0;
  long wrong = 0;
  std::string notes;
};

std::vector<Verdict> read_verdicts(std::istream& in);

struct CorrectnessRow {
  std::optional<IdiomKind> idiom;
  long methods = 0;
  long a_ref = 0;
  long b_ref = 0;
  long a_correct = 0;
  long b_correct = 0;
  long a_wrong = 0;
  long b_wrong = 0;

  double a_rate() const { return a_ref ? static_cast<double>(a_correct) / static_cast<double>(a_ref) : 0.0; }
  double b_rate() const { return b_ref ? static_cast<double>(b_correct) / static_cast<double>(b_ref) : 0.0; }
};

struct CorrectnessTable {
  std::vector<CorrectnessRow> rows;
  CorrectnessRow totals;
};

// Throws std::invalid_argument for a verdict whose correct + wrong differs
// from refactorings_counted.
CorrectnessTable tally_verdicts(std::span<const Verdict> verdicts);
std::string correctness_csv(const CorrectnessTable& table);
std::string correctness_markdown(const CorrectnessTable& table, std::string_view label_a = "A",
                                 std::string_view label_b = "B");

}  // namespace pyidiom::bench
