#include "pyidiom/llm.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace pyidiom::llm {

using nlohmann::json;

std::string idiom_display_name(IdiomKind idiom) {
  switch (idiom) {
    case IdiomKind::ListComp: return "PEP 202 - List Comprehensions";
    case IdiomKind::FString: return "PEP 498 - Literal String Interpolation";
    case IdiomKind::StarInCall: return "PEP 448 - Additional Unpacking Generalizations";
    case IdiomKind::With: return "PEP 343 - The 'with' Statement";
    case IdiomKind::DictComp: return "PEP 274 - Dict Comprehensions";
    case IdiomKind::ChainAssignSameValue: return "chain assignment of the same value";
    default: return std::string(idiom_info(idiom).display_name);
  }
}

Prompt build_prompt(IdiomKind idiom, std::string_view code) {
  if (code.empty()) throw std::invalid_argument("build_prompt: empty code");
  const std::string name = idiom_display_name(idiom);
  Prompt p;
  p.system = "You are a software developer, skilled in writing Python source code and refactoring Python code using " + name;
  p.user = "Refactor the code using the " + name +
           " idiom, and provide the refactored Python code along with the number of " + name +
           " refactorings you have made: " + std::string(code);
  return p;
}

std::string_view to_string(ResponseIssue issue) {
  switch (issue) {
    case ResponseIssue::None: return "ok";
    case ResponseIssue::MissingCode: return "missing_code";
    case ResponseIssue::MissingCount: return "missing_count";
  }
  return "?";
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_fence(std::string_view line) { return trim(line).substr(0, 3) == "```"; }

bool is_blank(std::string_view line) { return trim(line).empty(); }

std::string join(std::span<const std::string_view> lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

bool parses(const std::string& text) {
  try {
    parse(text);
    return true;
  } catch (const SyntaxError&) {
    return false;
  }
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Standalone integers in `text`: not part of an identifier or a decimal,
// and not the number of a PEP reference.
struct Number {
  long value;
  std::size_t begin;
  std::size_t end;
};

std::vector<Number> integers(std::string_view text) {
  std::vector<Number> out;
  for (std::size_t i = 0; i < text.size();) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    const bool glued_before = i > 0 && (word_char(text[i - 1]) || (text[i - 1] == '.' && i > 1 &&
                                                                    std::isdigit(static_cast<unsigned char>(text[i - 2]))));
    const bool glued_after = j < text.size() && (word_char(text[j]) || (text[j] == '.' && j + 1 < text.size() &&
                                                                        std::isdigit(static_cast<unsigned char>(text[j + 1]))));
    std::size_t k = i;
    while (k > 0 && (text[k - 1] == ' ' || text[k - 1] == '-')) --k;
    const bool pep = k >= 3 && (text.substr(k - 3, 3) == "PEP" || text.substr(k - 3, 3) == "pep");
    if (!glued_before && !glued_after && !pep && j - i <= 9) out.push_back({std::stol(std::string(text.substr(i, j - i))), i, j});
    i = j;
  }
  return out;
}

std::vector<std::string_view> sentences(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool end = c == '\n' || ((c == '.' || c == '!' || c == '?') &&
                                   (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]))));
    if (end) {
      out.push_back(text.substr(start, i + 1 - start));
      start = i + 1;
    }
  }
  if (start < text.size()) out.push_back(text.substr(start));
  return out;
}

// Offset of "refactoring" in `sentence`, case-insensitive.
std::optional<std::size_t> refactoring_word(std::string_view sentence) {
  std::string lower(sentence);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  const auto at = lower.find("refactoring");
  if (at == std::string::npos) return std::nullopt;
  return at;
}

// In a sentence about refactorings, the integer nearest the word wins.
std::optional<long> find_count(std::string_view after) {
  for (std::string_view s : sentences(after)) {
    const auto word = refactoring_word(s);
    if (!word) continue;
    const std::size_t word_end = *word + std::string_view("refactoring").size();
    std::optional<long> best;
    std::size_t best_gap = 0;
    for (const Number& n : integers(s)) {
      const std::size_t gap = n.end <= *word ? *word - n.end : n.begin >= word_end ? n.begin - word_end : 0;
      if (!best || gap < best_gap) {
        best = n.value;
        best_gap = gap;
      }
    }
    if (best) return best;
  }
  const auto found = integers(after);
  if (!found.empty()) return found.front().value;
  return std::nullopt;
}

}  // namespace

ParsedResponse parse_response(std::string_view raw) {
  ParsedResponse out;
  const auto lines = split_lines(raw);
  std::string after;
  bool found = false;
  for (std::size_t i = 0; i < lines.size() && !found; ++i) {
    if (!is_fence(lines[i])) continue;
    std::size_t j = i + 1;
    while (j < lines.size() && !is_fence(lines[j])) ++j;
    out.code = join(std::span(lines).subspan(i + 1, j - i - 1));
    if (j < lines.size()) after = join(std::span(lines).subspan(j + 1));
    found = true;
  }
  if (!found) {
    // Longest contiguous run of lines that parses; blank edges do not count.
    std::size_t best_begin = 0;
    std::size_t best_end = 0;
    for (std::size_t b = 0; b < lines.size(); ++b) {
      if (is_blank(lines[b])) continue;
      for (std::size_t e = lines.size(); e > b && e - b > best_end - best_begin; --e) {
        if (is_blank(lines[e - 1])) continue;
        if (parses(join(std::span(lines).subspan(b, e - b)))) {
          best_begin = b;
          best_end = e;
          break;
        }
      }
    }
    // A lone single-word line is prose as often as it is code.
    const bool trivial = best_end - best_begin == 1 &&
                         std::all_of(lines[best_begin].begin(), lines[best_begin].end(),
                                     [](char c) { return word_char(c) || std::isspace(static_cast<unsigned char>(c)); });
    if (best_end > best_begin && !trivial) {
      out.code = join(std::span(lines).subspan(best_begin, best_end - best_begin));
      after = join(std::span(lines).subspan(best_end));
    }
  }
  if (!out.code) {
    out.issue = ResponseIssue::MissingCode;
    out.count = find_count(raw);
    return out;
  }
  out.count = find_count(after);
  if (!out.count) out.issue = ResponseIssue::MissingCount;
  return out;
}

std::string request_body(const ChatRequest& request) {
  json body = {{"model", request.model},
               {"messages",
                json::array({{{"role", "system"}, {"content", request.prompt.system}},
                             {{"role", "user"}, {"content", request.prompt.user}}})},
               {"temperature", request.parameters.temperature},
               {"top_p", request.parameters.top_p},
               {"max_tokens", request.parameters.max_tokens}};
  return body.dump();
}

std::optional<std::string> response_content(std::string_view body) {
  try {
    const json parsed = json::parse(body);
    const json& content = parsed.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
  } catch (const json::exception&) {
  }
  return std::nullopt;
}

std::string_view to_string(ProviderStatus status) {
  switch (status) {
    case ProviderStatus::Ok: return "ok";
    case ProviderStatus::RateLimited: return "rate_limited";
    case ProviderStatus::ServerError: return "server_error";
    case ProviderStatus::ClientError: return "client_error";
    case ProviderStatus::NetworkError: return "network_error";
    case ProviderStatus::MissingReplay: return "missing_replay";
  }
  return "?";
}

bool ProviderResult::retryable() const {
  return status == ProviderStatus::RateLimited || status == ProviderStatus::ServerError ||
         status == ProviderStatus::NetworkError;
}

HttpSettings HttpSettings::from_environment() {
  auto env = [](const char* primary, const char* fallback) {
    if (const char* v = std::getenv(primary); v && *v) return std::string(v);
    if (const char* v = std::getenv(fallback); v && *v) return std::string(v);
    return std::string();
  };
  HttpSettings s;
  s.base_url = env("PYIDIOM_LLM_ENDPOINT", "OPENAI_BASE_URL");
  if (s.base_url.empty()) s.base_url = "https://api.openai.com/v1";
  s.api_key = env("PYIDIOM_LLM_API_KEY", "OPENAI_API_KEY");
  return s;
}

std::string_view to_string(ExchangeStatus status) {
  switch (status) {
    case ExchangeStatus::Ok: return "ok";
    case ExchangeStatus::ProviderUnavailable: return "provider_unavailable";
    case ExchangeStatus::MissingReplay: return "missing_replay";
    case ExchangeStatus::Rejected: return "rejected";
  }
  return "?";
}

namespace {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int size = 0;
  if (!EVP_Digest(data.data(), data.size(), digest, &size, EVP_sha256(), nullptr)) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < size; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

json canonical_request(const ChatRequest& request) {
  return json{{"model", request.model},
              {"system", request.prompt.system},
              {"user", request.prompt.user},
              {"temperature", request.parameters.temperature},
              {"top_p", request.parameters.top_p},
              {"max_tokens", request.parameters.max_tokens}};
}

}  // namespace

ReplayStore::ReplayStore(std::filesystem::path directory) : directory_(std::move(directory)) {}

std::string ReplayStore::key(const ChatRequest& request) { return sha256_hex(canonical_request(request).dump()); }

std::optional<std::string> ReplayStore::lookup(const ChatRequest& request) const {
  const auto path = directory_ / (key(request) + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const json entry = json::parse(in);
    return entry.at("response").get<std::string>();
  } catch (const json::exception& e) {
    throw std::runtime_error("corrupt replay entry " + path.string() + ": " + e.what());
  }
}

void ReplayStore::store(const ChatRequest& request, std::string_view response) {
  const std::lock_guard lock(mutex_);
  std::filesystem::create_directories(directory_);
  const std::string k = key(request);
  const json entry = {{"key", k}, {"request", canonical_request(request)}, {"response", std::string(response)}};
  const auto final_path = directory_ / (k + ".json");
  const auto temp_path = directory_ / (k + ".json.tmp");
  {
    std::ofstream out(temp_path, std::ios::binary | std::ios::trunc);
    out << entry.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + temp_path.string());
  }
  std::filesystem::rename(temp_path, final_path);
}

ProviderResult ReplayProvider::complete(const ChatRequest& request) {
  if (auto text = store_.lookup(request)) return ProviderResult{ProviderStatus::Ok, 200, std::move(*text), {}};
  return ProviderResult{ProviderStatus::MissingReplay, 0, {}, "no replay entry " + ReplayStore::key(request)};
}

ProviderResult RecordingProvider::complete(const ChatRequest& request) {
  ProviderResult result = inner_.complete(request);
  if (result.status == ProviderStatus::Ok) store_.store(request, result.text);
  return result;
}

double RetryPolicy::backoff(int retry) const {
  double delay = initial_backoff;
  for (int i = 1; i < retry; ++i) delay *= multiplier;
  return std::min(delay, max_backoff);
}

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)), last_(Clock::now()) {}

void TokenBucket::acquire() {
  if (rate_ <= 0) return;
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = Clock::now();
    tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    lock.unlock();
    std::this_thread::sleep_for(wait);
    lock.lock();
  }
}

std::vector<PromptExchange> run_idiom_batch(std::span<const bench::BenchRecord> records, CompletionProvider& provider,
                                            IdiomKind idiom, const BatchOptions& options) {
  std::vector<PromptExchange> out(records.size());
  TokenBucket bucket(options.requests_per_second, std::max(1.0, options.requests_per_second));
  const auto sleep = options.sleep ? options.sleep : [](double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  };
  std::mutex log_mutex;
  auto log = [&](const std::string& line) {
    if (!options.log) return;
    const std::lock_guard lock(log_mutex);
    options.log(line);
  };

  auto run_one = [&](std::size_t index) {
    const bench::BenchRecord& record = records[index];
    PromptExchange& ex = out[index];
    ex.method_id = record.method_id;
    ex.idiom = idiom;
    ex.model_id = options.model;
    ex.parameters = options.parameters;
    if (record.original_code.empty()) {
      ex.status = ExchangeStatus::Rejected;
      ex.error = "empty code";
      return;
    }
    const ChatRequest request{options.model, build_prompt(idiom, record.original_code), options.parameters};
    ex.system_prompt = request.prompt.system;
    ex.user_prompt = request.prompt.user;
    const int attempts = std::max(1, options.retry.max_attempts);
    for (int attempt = 1;; ++attempt) {
      bucket.acquire();
      ProviderResult result;
      try {
        result = provider.complete(request);
      } catch (const std::exception& e) {
        result = ProviderResult{ProviderStatus::NetworkError, 0, {}, e.what()};
      }
      if (result.status == ProviderStatus::Ok) {
        ex.raw_response = std::move(result.text);
        const ParsedResponse parsed = parse_response(ex.raw_response);
        ex.parsed_code = parsed.code;
        ex.parsed_count = parsed.count;
        ex.issue = parsed.issue;
        ex.status = ExchangeStatus::Ok;
        return;
      }
      ex.error = std::string(to_string(result.status)) + (result.error.empty() ? "" : ": " + result.error);
      if (result.status == ProviderStatus::MissingReplay) {
        ex.status = ExchangeStatus::MissingReplay;
        return;
      }
      if (!result.retryable()) {
        ex.status = ExchangeStatus::Rejected;
        return;
      }
      if (attempt >= attempts) {
        ex.status = ExchangeStatus::ProviderUnavailable;
        return;
      }
      const double delay = options.retry.backoff(attempt);
      ++ex.retries;
      log(record.method_id + ": " + std::string(to_string(result.status)) + ", retry " + std::to_string(attempt) +
          " in " + std::to_string(delay) + "s");
      sleep(delay);
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.concurrency, records.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < records.size(); ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < records.size(); i = next++) run_one(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace pyidiom::llm
