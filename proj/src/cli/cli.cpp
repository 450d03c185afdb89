#include "pyidiom/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "pyidiom/bench.hpp"
#include "pyidiom/equivalence.hpp"
#include "pyidiom/idioms.hpp"
#include "pyidiom/llm.hpp"

namespace pyidiom::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path temp = path.string() + ".pyidiom-tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + temp.string());
  }
  fs::rename(temp, path);
}

void write_output(const std::string& target, const std::string& text, std::ostream& out) {
  if (target.empty() || target == "-") {
    out << text;
  } else {
    write_atomic(target, text);
  }
}

std::vector<IdiomKind> select_idioms(const std::string& spec) {
  if (spec == "all") return {kAllIdioms.begin(), kAllIdioms.end()};
  std::set<IdiomKind> chosen;
  std::stringstream ss(spec);
  for (std::string name; std::getline(ss, name, ',');) {
    const auto kind = parse_idiom(name);
    if (!kind) throw UsageError("unknown idiom '" + name + "'");
    chosen.insert(*kind);
  }
  std::vector<IdiomKind> out;
  for (IdiomKind k : kAllIdioms) {
    if (chosen.count(k)) out.push_back(k);
  }
  if (out.empty()) throw UsageError("no idiom selected");
  return out;
}

std::vector<fs::path> expand_paths(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".py") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      out.push_back(p);
    } else {
      throw std::runtime_error("no such file: " + input);
    }
  }
  return out;
}

// Runs fn(i) for i in [0, n) on a bounded pool.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency())));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct FileResult {
  fs::path path;
  std::string error;
  std::string warning;
  std::vector<SiteRewrite> sites;  // detect
  RefactorReport report;           // refactor
};

std::string_view outcome_name(GuardOutcome o) {
  switch (o) {
    case GuardOutcome::Pass: return "pass";
    case GuardOutcome::Fail: return "fail";
    case GuardOutcome::Unknown: return "unknown";
  }
  return "?";
}

json site_json(const DetectionSite& s) {
  json guards = json::array();
  for (const auto& g : s.guards) guards.push_back({{"name", g.name}, {"outcome", outcome_name(g.outcome)}});
  return {{"idiom", std::string(to_string(s.idiom))},
          {"line", s.line},
          {"start", s.span.start},
          {"end", s.span.end},
          {"passed", s.passed()},
          {"bindings", s.bindings},
          {"guards", guards}};
}

std::string mixed_warning(const SourceUnit& unit) {
  return unit.indent().mixed ? "mixed indentation; rewriting with the dominant unit" : "";
}

int cmd_detect(const std::vector<std::string>& paths, const std::string& idiom_spec, const std::string& format,
               bool candidates, const EngineOptions& options, std::ostream& out, std::ostream& err) {
  const auto idioms = select_idioms(idiom_spec);
  const auto files = expand_paths(paths);
  std::vector<FileResult> results(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    FileResult& r = results[i];
    r.path = files[i];
    try {
      const SourceUnit unit = parse(read_file(files[i]), files[i].string());
      r.warning = mixed_warning(unit);
      SafetyFacts facts(unit, AnalysisOptions{options.assume_pure_attributes});
      for (IdiomKind k : idioms) {
        auto sites = candidates ? detect_candidates(k, unit, facts, options) : refactor(k, unit, facts, options);
        r.sites.insert(r.sites.end(), sites.begin(), sites.end());
      }
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
  bool failed = false;
  json doc = json::array();
  for (const auto& r : results) {
    if (!r.warning.empty()) err << r.path.string() << ": warning: " << r.warning << '\n';
    if (!r.error.empty()) {
      err << r.path.string() << ": error: " << r.error << '\n';
      failed = true;
      continue;
    }
    if (format == "json") {
      json sites = json::array();
      for (const auto& s : r.sites) sites.push_back(site_json(s.site));
      doc.push_back({{"path", r.path.string()}, {"sites", sites}});
    } else {
      for (const auto& s : r.sites) {
        out << r.path.string() << ':' << s.site.line << ": " << to_string(s.site.idiom);
        if (const GuardResult* g = s.site.first_failure()) {
          out << " (blocked: " << g->name << ' ' << outcome_name(g->outcome) << ')';
        }
        out << '\n';
      }
    }
  }
  if (format == "json") out << doc.dump(2) << '\n';
  return failed ? kExitError : kExitOk;
}

int cmd_refactor(const std::vector<std::string>& paths, const std::string& idiom_spec, bool in_place, bool count,
                 const EngineOptions& options, std::ostream& out, std::ostream& err) {
  const auto idioms = select_idioms(idiom_spec);
  const auto files = expand_paths(paths);
  std::vector<FileResult> results(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    FileResult& r = results[i];
    r.path = files[i];
    try {
      const SourceUnit unit = parse(read_file(files[i]), files[i].string());
      r.warning = mixed_warning(unit);
      r.report = detect_all(unit, idioms, options, files[i].string());
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
  bool failed = false;
  const bool many = files.size() > 1;
  for (const auto& r : results) {
    if (!r.warning.empty()) err << r.path.string() << ": warning: " << r.warning << '\n';
    if (!r.error.empty()) {
      err << r.path.string() << ": error: " << r.error << '\n';
      failed = true;
      continue;
    }
    if (in_place) {
      if (r.report.total() > 0) {
        try {
          write_atomic(r.path, r.report.refactored_text);
        } catch (const std::exception& e) {
          err << r.path.string() << ": error: " << e.what() << '\n';
          failed = true;
        }
      }
    } else {
      if (many) out << "# " << r.path.string() << '\n';
      out << r.report.refactored_text;
      if (!r.report.refactored_text.empty() && r.report.refactored_text.back() != '\n') out << '\n';
    }
    if (count) {
      for (IdiomKind k : idioms) {
        if (many || in_place) out << r.path.string() << ": ";
        out << to_string(k) << ": " << r.report.counts.at(k) << '\n';
      }
    }
  }
  return failed ? kExitError : kExitOk;
}

struct EvaluateArgs {
  std::string dataset;
  std::string source = "engine";
  std::string provider = "replay";
  std::string replay_dir;
  std::string out;
  std::string report;
  std::string exchanges;
  std::string model{llm::kDefaultModel};
  llm::Parameters parameters;
  std::size_t concurrency = 4;
  double rate = 0.0;
  int max_attempts = 5;
};

bool is_markdown(const std::string& path) { return path.size() > 3 && path.ends_with(".md"); }

int cmd_evaluate(const EvaluateArgs& a, const EngineOptions& options, std::ostream& out, std::ostream& err) {
  if (a.source != "engine" && a.source != "llm") throw UsageError("--source must be engine or llm");
  if (a.provider != "http" && a.provider != "replay") throw UsageError("--provider must be http or replay");
  if (a.source == "llm" && a.provider == "replay" && a.replay_dir.empty()) {
    throw UsageError("--provider replay needs --replay-dir");
  }
  const bench::Dataset data = bench::load_dataset(a.dataset);
  if (data.duplicates_removed) err << "removed " << data.duplicates_removed << " duplicate records\n";
  for (const auto& f : data.failures) err << "skipped " << f.method_id << ": " << f.message << '\n';
  const auto& records = data.records;

  std::vector<std::optional<long>> counts(records.size());
  if (a.source == "engine") {
    std::vector<std::string> errors(records.size());
    parallel_for(records.size(), [&](std::size_t i) {
      try {
        const SourceUnit unit = parse(records[i].original_code, records[i].method_id);
        const IdiomKind one[] = {records[i].idiom};
        counts[i] = static_cast<long>(detect_all(unit, one, options, records[i].method_id).counts.at(records[i].idiom));
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!errors[i].empty()) err << records[i].method_id << ": " << errors[i] << '\n';
    }
  } else {
    std::unique_ptr<llm::ReplayStore> store;
    if (!a.replay_dir.empty()) store = std::make_unique<llm::ReplayStore>(a.replay_dir);
    std::unique_ptr<llm::CompletionProvider> http;
    std::unique_ptr<llm::CompletionProvider> provider;
    if (a.provider == "http") {
      http = std::make_unique<llm::HttpProvider>(llm::HttpSettings::from_environment());
      if (store) provider = std::make_unique<llm::RecordingProvider>(*http, *store);
    } else {
      provider = std::make_unique<llm::ReplayProvider>(*store);
    }
    llm::CompletionProvider& chosen = provider ? *provider : *http;
    llm::BatchOptions batch;
    batch.model = a.model;
    batch.parameters = a.parameters;
    batch.concurrency = a.concurrency;
    batch.requests_per_second = a.rate;
    batch.retry.max_attempts = a.max_attempts;
    batch.log = [&](const std::string& line) { err << line << '\n'; };
    std::ofstream exchange_log;
    if (!a.exchanges.empty()) exchange_log.open(a.exchanges, std::ios::binary | std::ios::trunc);
    for (IdiomKind kind : kAllIdioms) {
      std::vector<std::size_t> index;
      std::vector<bench::BenchRecord> group;
      for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].idiom == kind) {
          index.push_back(i);
          group.push_back(records[i]);
        }
      }
      if (group.empty()) continue;
      const auto exchanges = llm::run_idiom_batch(group, chosen, kind, batch);
      for (std::size_t j = 0; j < exchanges.size(); ++j) {
        const auto& ex = exchanges[j];
        if (ex.status != llm::ExchangeStatus::Ok) {
          err << ex.method_id << ": " << to_string(ex.status) << ' ' << ex.error << '\n';
        } else if (!ex.parsed_count) {
          err << ex.method_id << ": " << to_string(ex.issue) << ", excluded pending manual review\n";
        } else {
          counts[index[j]] = *ex.parsed_count;
        }
        if (exchange_log.is_open()) {
          json line = {{"method_id", ex.method_id},
                       {"idiom", std::string(to_string(ex.idiom))},
                       {"status", std::string(to_string(ex.status))},
                       {"issue", std::string(to_string(ex.issue))},
                       {"retries", ex.retries},
                       {"raw_response", ex.raw_response}};
          line["parsed_count"] = ex.parsed_count ? json(*ex.parsed_count) : json(nullptr);
          exchange_log << line.dump() << '\n';
        }
      }
    }
  }

  std::vector<bench::MethodCount> per_method;
  std::vector<bench::SourceCount> report;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!counts[i]) continue;
    per_method.push_back({records[i].method_id, records[i].idiom, *counts[i], records[i].benchmark_count});
    report.push_back({records[i].method_id, records[i].idiom, *counts[i]});
  }
  const auto table = bench::compare_counts(per_method);
  write_output(a.out, is_markdown(a.out) ? bench::comparison_markdown(table, a.source, "benchmark")
                                         : bench::comparison_csv(table),
               out);
  if (!a.report.empty()) write_atomic(a.report, bench::source_report_csv(report));
  return per_method.size() == records.size() ? kExitOk : kExitError;
}

std::vector<bench::SourceCount> load_counts(const std::string& path) {
  if (path.ends_with(".jsonl")) {
    std::vector<bench::SourceCount> out;
    for (const auto& r : bench::load_dataset(path).records) out.push_back({r.method_id, r.idiom, r.benchmark_count});
    return out;
  }
  return bench::read_source_report(path);
}

int cmd_compare(const std::string& left, const std::string& right, const std::string& target, std::ostream& out) {
  const auto l = load_counts(left);
  const auto r = load_counts(right);
  const auto table = bench::compare_counts(bench::join_reports(l, r));
  write_output(target, is_markdown(target) ? bench::comparison_markdown(table, "left", "right") : bench::comparison_csv(table),
               out);
  return kExitOk;
}

int cmd_sample(const std::string& dataset, const std::vector<std::string>& reports, std::size_t n, std::uint64_t seed,
               std::ostream& out, std::ostream& err) {
  const auto data = bench::load_dataset(dataset);
  std::map<IdiomKind, bench::Stratum> strata;
  std::set<std::pair<IdiomKind, std::string>> seen;
  for (const auto& r : data.records) {
    bench::Stratum& s = strata[r.idiom];
    s.idiom = r.idiom;
    if (seen.emplace(r.idiom, r.method_id).second) s.method_ids.push_back(r.method_id);
    s.weight += r.benchmark_count;
  }
  for (const auto& path : reports) {
    for (const auto& c : bench::read_source_report(path)) {
      if (strata.count(c.idiom)) strata[c.idiom].weight += c.count;
    }
  }
  std::vector<bench::Stratum> ordered;
  for (IdiomKind k : kAllIdioms) {
    if (strata.count(k)) ordered.push_back(strata[k]);
  }
  std::size_t population = 0;
  for (const auto& s : ordered) population += s.method_ids.size();
  if (n > population) {
    err << "error: sample of " << n << " exceeds population " << population << '\n';
    return kExitUsage;
  }
  out << "idiom,method_id\n";
  for (const auto& s : bench::sample_for_review(ordered, n, seed)) {
    for (const auto& id : s.method_ids) out << to_string(s.idiom) << ',' << bench::csv_escape(id) << '\n';
  }
  return kExitOk;
}

int cmd_check(const std::string& pairs_dir, const std::string& corpus_dir, const std::string& idiom_spec,
              const std::string& runner, double timeout, std::size_t workers, const EngineOptions& options,
              std::ostream& out, std::ostream& err) {
  if (pairs_dir.empty() == corpus_dir.empty()) throw UsageError("give exactly one of --pairs or --corpus");
  std::vector<equivalence::Pair> pairs;
  if (!pairs_dir.empty()) {
    pairs = equivalence::load_pairs(pairs_dir);
  } else {
    const auto idioms = select_idioms(idiom_spec);
    for (const auto& path : expand_paths({corpus_dir})) {
      const std::string text = read_file(path);
      const auto report = detect_all(parse(text, path.string()), idioms, options, path.string());
      pairs.push_back({path.filename().string(), text, report.refactored_text});
    }
  }
  equivalence::CheckOptions check;
  check.runner = runner;
  check.timeout = std::chrono::milliseconds(static_cast<long>(timeout * 1000));
  const auto summary = equivalence::check_corpus(pairs, check, workers);
  for (const auto& r : summary.results) {
    out << r.method_id << ": " << to_string(r.status);
    if (!r.detail.empty()) out << " (" << r.detail << ')';
    out << '\n';
  }
  out << "summary:";
  for (const auto& [status, n] : summary.counts) out << ' ' << to_string(status) << '=' << n;
  out << '\n';
  (void)err;
  return kExitOk;
}

int cmd_tally(const std::string& path, const std::string& target, std::ostream& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  const auto verdicts = bench::read_verdicts(in);
  const auto table = bench::tally_verdicts(verdicts);
  std::string text = is_markdown(target) ? bench::correctness_markdown(table) : bench::correctness_csv(table);
  char rates[96];
  std::snprintf(rates, sizeof rates, "# correct rate A=%.1f%% B=%.1f%%\n", 100.0 * table.totals.a_rate(),
                100.0 * table.totals.b_rate());
  write_output(target, text, out);
  out << rates;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Refactors Python anti-idioms into idiomatic code and evaluates refactoring sources.", "pyidiom"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  EngineOptions options;
  auto add_engine_flags = [&](CLI::App* sub) {
    sub->add_flag("--strict-none", options.strict_none, "Rewrite `X == None` to `X is None`");
    sub->add_flag("--assume-pure-attributes", options.assume_pure_attributes, "Treat attribute loads as pure");
    sub->add_flag("--strict-arity", options.strict_arity, "Require provable element length for loop unpacking");
    sub->add_option("--acquire", options.acquire_functions, "Functions treated as resource acquisition")
        ->capture_default_str();
  };

  std::vector<std::string> paths;
  std::string idiom = "all";
  std::string format = "text";
  bool candidates = false;
  auto* detect = app.add_subcommand("detect", "List refactoring sites");
  detect->add_option("paths", paths, "Files or directories")->required();
  detect->add_option("--idiom", idiom, "Idiom name, comma list or 'all'")->capture_default_str();
  detect->add_option("--format", format)->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  detect->add_flag("--candidates", candidates, "Include sites blocked by a guard");
  add_engine_flags(detect);

  bool to_stdout = false;
  bool in_place = false;
  bool count = false;
  auto* refactor_cmd = app.add_subcommand("refactor", "Rewrite files");
  refactor_cmd->add_option("paths", paths, "Files or directories")->required();
  refactor_cmd->add_option("--idiom", idiom, "Idiom name, comma list or 'all'")->capture_default_str();
  auto* stdout_flag = refactor_cmd->add_flag("--stdout", to_stdout, "Print rewritten code (default)");
  refactor_cmd->add_flag("--in-place", in_place, "Rewrite files atomically")->excludes(stdout_flag);
  refactor_cmd->add_flag("--count", count, "Print per-idiom refactoring counts");
  add_engine_flags(refactor_cmd);

  EvaluateArgs eval;
  auto* evaluate = app.add_subcommand("evaluate", "Count refactorings per dataset method and compare with the benchmark");
  evaluate->add_option("--dataset", eval.dataset, "JSONL dataset")->required();
  evaluate->add_option("--source", eval.source)->check(CLI::IsMember({"engine", "llm"}))->capture_default_str();
  evaluate->add_option("--provider", eval.provider)->check(CLI::IsMember({"http", "replay"}))->capture_default_str();
  evaluate->add_option("--replay-dir", eval.replay_dir, "Replay store (read for replay, written for http)");
  evaluate->add_option("--out", eval.out, "Comparison table (.csv or .md); stdout if absent");
  evaluate->add_option("--report", eval.report, "Per-method counts of the source (CSV)");
  evaluate->add_option("--exchanges", eval.exchanges, "Prompt exchanges (JSONL)");
  evaluate->add_option("--model", eval.model)->capture_default_str();
  evaluate->add_option("--temperature", eval.parameters.temperature)->capture_default_str();
  evaluate->add_option("--top-p", eval.parameters.top_p)->capture_default_str();
  evaluate->add_option("--max-tokens", eval.parameters.max_tokens)->capture_default_str();
  evaluate->add_option("--concurrency", eval.concurrency)->check(CLI::PositiveNumber)->capture_default_str();
  evaluate->add_option("--rate", eval.rate, "Requests per second, 0 for unlimited")->capture_default_str();
  evaluate->add_option("--max-attempts", eval.max_attempts)->check(CLI::PositiveNumber)->capture_default_str();
  add_engine_flags(evaluate);

  std::string left;
  std::string right;
  std::string target;
  auto* compare = app.add_subcommand("compare", "Compare two per-method count reports");
  compare->add_option("--left", left, "Report CSV or dataset JSONL")->required();
  compare->add_option("--right", right, "Report CSV or dataset JSONL")->required();
  compare->add_option("--out", target, "Output (.csv or .md); stdout if absent");

  std::string dataset;
  std::vector<std::string> reports;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  auto* sample = app.add_subcommand("sample", "Draw a stratified sample of methods for manual review");
  sample->add_option("--dataset", dataset)->required();
  sample->add_option("--n", n)->required();
  sample->add_option("--seed", seed)->required();
  sample->add_option("--report", reports, "Per-method counts added to the strata weights");

  std::string pairs_dir;
  std::string corpus_dir;
  std::string runner;
  double timeout = 10.0;
  std::size_t workers = 4;
  auto* check = app.add_subcommand("check", "Differential execution of original and refactored scripts");
  check->add_option("--pairs", pairs_dir, "Directory of <id>.original.py / <id>.refactored.py");
  check->add_option("--corpus", corpus_dir, "Directory of scripts to refactor and compare");
  check->add_option("--idiom", idiom, "Idioms applied with --corpus")->capture_default_str();
  check->add_option("--runner", runner, "Python interpreter");
  check->add_option("--timeout", timeout, "Seconds per run")->check(CLI::PositiveNumber)->capture_default_str();
  check->add_option("--workers", workers)->check(CLI::PositiveNumber)->capture_default_str();
  add_engine_flags(check);

  std::string verdicts;
  auto* tally = app.add_subcommand("tally", "Tabulate manual review verdicts");
  tally->add_option("--verdicts", verdicts, "Verdict JSONL")->required();
  tally->add_option("--out", target, "Output (.csv or .md); stdout if absent");

  std::vector<const char*> raw;
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp&) {
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    out << sub->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (detect->parsed()) return cmd_detect(paths, idiom, format, candidates, options, out, err);
    if (refactor_cmd->parsed()) return cmd_refactor(paths, idiom, in_place, count, options, out, err);
    if (evaluate->parsed()) return cmd_evaluate(eval, options, out, err);
    if (compare->parsed()) return cmd_compare(left, right, target, out);
    if (sample->parsed()) return cmd_sample(dataset, reports, n, seed, out, err);
    if (check->parsed()) {
      return cmd_check(pairs_dir, corpus_dir, idiom, runner, timeout, workers, options, out, err);
    }
    if (tally->parsed()) return cmd_tally(verdicts, target, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    for (CLI::App* sub : app.get_subcommands()) err << sub->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace pyidiom::cli
