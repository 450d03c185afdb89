#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pyidiom::equivalence {

enum class Status { Equivalent, Divergent, OriginalFails, Nondeterministic, Timeout };
std::string_view to_string(Status status);

class RunnerMissing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOutput {
  int exit_code = 0;  // negative signal number when killed by a signal
  std::string out;
  std::string err;
  bool timed_out = false;
};

struct CheckOptions {
  std::filesystem::path runner;  // empty: discover_runner()
  std::chrono::milliseconds timeout{10000};
};

/// PYIDIOM_PYTHON if set, else the first python3 on PATH.
std::filesystem::path discover_runner();

/// Runs `script` in a fresh scratch directory with a scrubbed environment.
RunOutput run_script(const std::string& script, const CheckOptions& options);

struct EquivalenceResult {
  std::string method_id;
  Status status = Status::Equivalent;
  std::string detail;
  std::array<RunOutput, 2> original;
  std::array<RunOutput, 2> refactored;
};

/// Each version runs twice. Throws RunnerMissing when the interpreter
/// cannot be executed.
EquivalenceResult check(const std::string& original, const std::string& refactored, const CheckOptions& options,
                        std::string method_id = "");

struct Pair {
  std::string method_id;
  std::string original;
  std::string refactored;
};

/// `<id>.original.py` / `<id>.refactored.py` files, sorted by id.
std::vector<Pair> load_pairs(const std::filesystem::path& directory);

struct Summary {
  std::map<Status, std::size_t> counts;
  std::vector<EquivalenceResult> results;  // input order

  std::size_t count(Status s) const;
};

Summary check_corpus(std::span<const Pair> pairs, const CheckOptions& options, std::size_t workers = 4);

}  // namespace pyidiom::equivalence
