#include "pyidiom/bench.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace pyidiom::bench {

using nlohmann::json;

FormatError::FormatError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

InsufficientPopulation::InsufficientPopulation(IdiomKind idiom, std::size_t wanted, std::size_t available)
    : std::runtime_error("stratum " + std::string(to_string(idiom)) + " needs " + std::to_string(wanted) +
                         " methods but has " + std::to_string(available)) {}

namespace {

IdiomKind idiom_field(const std::string& value, std::size_t line) {
  const auto kind = parse_idiom(value);
  if (!kind) throw FormatError(line, "unknown idiom '" + value + "'");
  return *kind;
}

std::string string_field(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(line, std::string("missing field '") + key + "'");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw FormatError(line, std::string("field '") + key + "' is not a string");
}

long count_field(const std::string& text, std::size_t line, const char* key) {
  std::size_t used = 0;
  long value = -1;
  try {
    value = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || value < 0) {
    throw FormatError(line, std::string("field '") + key + "' is not a non-negative integer");
  }
  return value;
}

void admit(Dataset& data, std::set<std::tuple<IdiomKind, std::string, std::string>>& seen, BenchRecord record) {
  if (!seen.emplace(record.idiom, record.method_id, record.original_code).second) {
    ++data.duplicates_removed;
    return;
  }
  try {
    parse(record.original_code);
  } catch (const SyntaxError& e) {
    data.failures.push_back(ParseFailure{record.method_id, e.what()});
    return;
  }
  data.records.push_back(std::move(record));
}

}  // namespace

Dataset read_dataset(std::istream& in) {
  Dataset data;
  std::set<std::tuple<IdiomKind, std::string, std::string>> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(number, e.what());
    }
    if (!obj.is_object()) throw FormatError(number, "record is not an object");
    BenchRecord r;
    r.idiom = idiom_field(string_field(obj, "idiom", number), number);
    r.method_id = string_field(obj, "method_id", number);
    r.repo = string_field(obj, "repo", number);
    r.original_code = string_field(obj, "original_code", number);
    r.benchmark_refactored_code = string_field(obj, "benchmark_refactored_code", number);
    const auto count = obj.find("benchmark_count");
    if (count == obj.end() || !count->is_number_integer() || count->get<long long>() < 0) {
      throw FormatError(number, "field 'benchmark_count' is not a non-negative integer");
    }
    r.benchmark_count = count->get<int>();
    admit(data, seen, std::move(r));
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  return read_dataset(in);
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (any || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Dataset load_csv_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto rows = parse_csv(buffer.str());
  Dataset data;
  if (rows.empty()) return data;
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < rows[0].size(); ++i) column[rows[0][i]] = i;
  for (const char* key : {"idiom", "method_id", "repo", "original_code", "benchmark_refactored_code",
                          "benchmark_count"}) {
    if (!column.count(key)) throw FormatError(1, std::string("missing column '") + key + "'");
  }
  std::set<std::tuple<IdiomKind, std::string, std::string>> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != rows[0].size()) throw FormatError(i + 1, "wrong number of fields");
    BenchRecord r;
    r.idiom = idiom_field(row[column["idiom"]], i + 1);
    r.method_id = row[column["method_id"]];
    r.repo = row[column["repo"]];
    r.original_code = row[column["original_code"]];
    r.benchmark_refactored_code = row[column["benchmark_refactored_code"]];
    r.benchmark_count = static_cast<int>(count_field(row[column["benchmark_count"]], i + 1, "benchmark_count"));
    admit(data, seen, std::move(r));
  }
  return data;
}

void write_dataset(std::ostream& out, std::span<const BenchRecord> records) {
  for (const auto& r : records) {
    json obj = {{"idiom", std::string(to_string(r.idiom))},
                {"method_id", r.method_id},
                {"repo", r.repo},
                {"original_code", r.original_code},
                {"benchmark_refactored_code", r.benchmark_refactored_code},
                {"benchmark_count", r.benchmark_count}};
    out << obj.dump() << '\n';
  }
}

ComparisonTable compare_counts(std::span<const MethodCount> per_method) {
  std::map<IdiomKind, ComparisonRow> rows;
  for (const auto& m : per_method) {
    if (m.count_a < 0 || m.count_b < 0) throw std::invalid_argument("negative count for " + m.method_id);
    ComparisonRow& row = rows[m.idiom];
    row.idiom = m.idiom;
    ++row.methods;
    row.count_a += m.count_a;
    row.count_b += m.count_b;
    if (m.count_a == m.count_b) ++row.equals;
    if (m.count_a > m.count_b) ++row.a_more;
    if (m.count_a < m.count_b) ++row.b_more;
    if (m.count_a == 0) ++row.a_zero;
  }
  ComparisonTable table;
  for (IdiomKind kind : kAllIdioms) {
    const auto it = rows.find(kind);
    if (it == rows.end()) continue;
    const ComparisonRow& row = it->second;
    table.rows.push_back(row);
    table.totals.methods += row.methods;
    table.totals.count_a += row.count_a;
    table.totals.count_b += row.count_b;
    table.totals.equals += row.equals;
    table.totals.a_more += row.a_more;
    table.totals.b_more += row.b_more;
    table.totals.a_zero += row.a_zero;
  }
  return table;
}

double relative_increase(long count_a, long count_b) {
  if (count_b == 0) throw std::invalid_argument("relative increase over zero");
  return static_cast<double>(count_a) / static_cast<double>(count_b) - 1.0;
}

namespace {

std::string row_label(const std::optional<IdiomKind>& idiom) {
  return idiom ? std::string(to_string(*idiom)) : "total";
}

std::string comparison_line(const ComparisonRow& r) {
  std::ostringstream out;
  out << row_label(r.idiom) << ',' << r.methods << ',' << r.count_a << ',' << r.count_b << ',' << r.equals << ','
      << r.a_more << ',' << r.b_more << ',' << r.a_zero << '\n';
  return out.str();
}

}  // namespace

std::string comparison_csv(const ComparisonTable& table) {
  std::string out = "idiom,methods,count_a,count_b,equals,a_more,b_more,a_zero\n";
  for (const auto& r : table.rows) out += comparison_line(r);
  out += comparison_line(table.totals);
  return out;
}

std::string comparison_markdown(const ComparisonTable& table, std::string_view a, std::string_view b) {
  std::ostringstream out;
  out << "| Idiom | Methods | " << a << " | " << b << " | Equals | " << a << " more | " << b << " more | " << a
      << " zero |\n";
  out << "|---|---:|---:|---:|---:|---:|---:|---:|\n";
  auto line = [&](const ComparisonRow& r) {
    out << "| " << (r.idiom ? std::string(idiom_info(*r.idiom).display_name) : "Total") << " | " << r.methods
        << " | " << r.count_a << " | " << r.count_b << " | " << r.equals << " | " << r.a_more << " | " << r.b_more
        << " | " << r.a_zero << " |\n";
  };
  for (const auto& r : table.rows) line(r);
  line(table.totals);
  return out.str();
}

std::string source_report_csv(std::span<const SourceCount> counts) {
  std::string out = "method_id,idiom,count\n";
  for (const auto& c : counts) {
    out += csv_escape(c.method_id) + ',' + std::string(to_string(c.idiom)) + ',' + std::to_string(c.count) + '\n';
  }
  return out;
}

std::vector<SourceCount> read_source_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open report " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto rows = parse_csv(buffer.str());
  if (rows.empty() || rows[0] != std::vector<std::string>{"method_id", "idiom", "count"}) {
    throw FormatError(1, "expected header method_id,idiom,count");
  }
  std::vector<SourceCount> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() == 1 && rows[i][0].empty()) continue;
    if (rows[i].size() != 3) throw FormatError(i + 1, "wrong number of fields");
    out.push_back(SourceCount{rows[i][0], idiom_field(rows[i][1], i + 1), count_field(rows[i][2], i + 1, "count")});
  }
  return out;
}

std::vector<MethodCount> join_reports(std::span<const SourceCount> left, std::span<const SourceCount> right) {
  std::map<std::pair<IdiomKind, std::string>, long> right_counts;
  for (const auto& r : right) right_counts[{r.idiom, r.method_id}] = r.count;
  std::vector<MethodCount> out;
  for (const auto& l : left) {
    const auto it = right_counts.find({l.idiom, l.method_id});
    if (it != right_counts.end()) out.push_back(MethodCount{l.method_id, l.idiom, l.count, it->second});
  }
  return out;
}

std::vector<std::size_t> largest_remainder(std::span<const long> weights, std::size_t n) {
  long total = 0;
  for (long w : weights) {
    if (w < 0) throw std::invalid_argument("negative stratum weight");
    total += w;
  }
  std::vector<std::size_t> out(weights.size(), 0);
  if (total == 0 || n == 0) return out;
  // Exact integer arithmetic: quota_i = n * w_i / total.
  std::vector<std::pair<long long, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const long long scaled = static_cast<long long>(n) * weights[i];
    out[i] = static_cast<std::size_t>(scaled / total);
    assigned += out[i];
    remainders.emplace_back(scaled % total, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++out[remainders[k].second];
  return out;
}

std::vector<StratumSample> sample_for_review(std::span<const Stratum> strata, std::size_t n, std::uint64_t seed) {
  std::size_t population = 0;
  std::vector<long> weights;
  for (const auto& s : strata) {
    population += s.method_ids.size();
    weights.push_back(s.weight);
  }
  if (n > population) throw std::invalid_argument("sample larger than population");
  std::vector<std::size_t> quota;
  if (n == population) {
    for (const auto& s : strata) quota.push_back(s.method_ids.size());
  } else {
    quota = largest_remainder(weights, n);
  }
  std::mt19937_64 rng(seed);
  auto below = [&](std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = rng();
    } while (x >= limit);
    return x % bound;
  };
  std::vector<StratumSample> out;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const Stratum& s = strata[i];
    if (quota[i] > s.method_ids.size()) throw InsufficientPopulation(s.idiom, quota[i], s.method_ids.size());
    std::vector<std::string> pool = s.method_ids;
    for (std::size_t k = 0; k < quota[i]; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(below(pool.size() - k));
      std::swap(pool[k], pool[j]);
    }
    pool.resize(quota[i]);
    out.push_back(StratumSample{s.idiom, std::move(pool)});
  }
  return out;
}

std::vector<Verdict> read_verdicts(std::istream& in) {
  std::vector<Verdict> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(number, e.what());
    }
    Verdict v;
    v.method_id = string_field(obj, "method_id", number);
    v.idiom = idiom_field(string_field(obj, "idiom", number), number);
    const std::string source = string_field(obj, "source", number);
    if (source != "A" && source != "B") throw FormatError(number, "source must be A or B");
    v.source = source == "A" ? Source::A : Source::B;
    for (auto [key, slot] : {std::pair{"refactorings_counted", &v.refactorings_counted},
                             std::pair{"correct", &v.correct}, std::pair{"wrong", &v.wrong}}) {
      const auto it = obj.find(key);
      if (it == obj.end() || !it->is_number_integer() || it->get<long>() < 0) {
        throw FormatError(number, std::string("field '") + key + "' is not a non-negative integer");
      }
      *slot = it->get<long>();
    }
    if (obj.contains("notes") && obj["notes"].is_string()) v.notes = obj["notes"].get<std::string>();
    out.push_back(std::move(v));
  }
  return out;
}

CorrectnessTable tally_verdicts(std::span<const Verdict> verdicts) {
  std::map<IdiomKind, CorrectnessRow> rows;
  std::map<IdiomKind, std::set<std::string>> methods;
  for (const auto& v : verdicts) {
    if (v.correct + v.wrong != v.refactorings_counted) {
      throw std::invalid_argument("verdict for " + v.method_id + " does not add up");
    }
    CorrectnessRow& row = rows[v.idiom];
    row.idiom = v.idiom;
    methods[v.idiom].insert(v.method_id);
    if (v.source == Source::A) {
      row.a_ref += v.refactorings_counted;
      row.a_correct += v.correct;
      row.a_wrong += v.wrong;
    } else {
      row.b_ref += v.refactorings_counted;
      row.b_correct += v.correct;
      row.b_wrong += v.wrong;
    }
  }
  CorrectnessTable table;
  for (IdiomKind kind : kAllIdioms) {
    auto it = rows.find(kind);
    if (it == rows.end()) continue;
    CorrectnessRow row = it->second;
    row.methods = static_cast<long>(methods[kind].size());
    table.rows.push_back(row);
    table.totals.methods += row.methods;
    table.totals.a_ref += row.a_ref;
    table.totals.b_ref += row.b_ref;
    table.totals.a_correct += row.a_correct;
    table.totals.b_correct += row.b_correct;
    table.totals.a_wrong += row.a_wrong;
    table.totals.b_wrong += row.b_wrong;
  }
  return table;
}

std::string correctness_csv(const CorrectnessTable& table) {
  std::ostringstream out;
  out << "idiom,methods,a_ref,b_ref,a_correct,b_correct,a_wrong,b_wrong\n";
  auto line = [&](const CorrectnessRow& r) {
    out << row_label(r.idiom) << ',' << r.methods << ',' << r.a_ref << ',' << r.b_ref << ',' << r.a_correct << ','
        << r.b_correct << ',' << r.a_wrong << ',' << r.b_wrong << '\n';
  };
  for (const auto& r : table.rows) line(r);
  line(table.totals);
  return out.str();
}

std::string correctness_markdown(const CorrectnessTable& table, std::string_view a, std::string_view b) {
  std::ostringstream out;
  out << "| Idiom | Methods | " << a << " ref | " << b << " ref | " << a << " correct | " << b << " correct | " << a
      << " wrong | " << b << " wrong |\n";
  out << "|---|---:|---:|---:|---:|---:|---:|---:|\n";
  auto line = [&](const CorrectnessRow& r) {
    out << "| " << (r.idiom ? std::string(idiom_info(*r.idiom).display_name) : "Total") << " | " << r.methods
        << " | " << r.a_ref << " | " << r.b_ref << " | " << r.a_correct << " | " << r.b_correct << " | "
        << r.a_wrong << " | " << r.b_wrong << " |\n";
  };
  for (const auto& r : table.rows) line(r);
  line(table.totals);
  return out.str();
}

}  // namespace pyidiom::bench
