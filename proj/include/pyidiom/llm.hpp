#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pyidiom/bench.hpp"
#include "pyidiom/idioms.hpp"

namespace pyidiom::llm {

inline constexpr std::string_view kDefaultModel = "chatgpt-4o-latest";

struct Parameters {
  double temperature = 1.0;
  double top_p = 1.0;
  int max_tokens = 4000;

  bool operator==(const Parameters&) const = default;
};

/// "PEP 202 - List Comprehensions" for PEP-backed idioms, the extended
/// catalogue name otherwise.
std::string idiom_display_name(IdiomKind idiom);

struct Prompt {
  std::string system;
  std::string user;
};

/// Throws std::invalid_argument when `code` is empty.
Prompt build_prompt(IdiomKind idiom, std::string_view code);

enum class ResponseIssue { None, MissingCode, MissingCount };
std::string_view to_string(ResponseIssue issue);

struct ParsedResponse {
  std::optional<std::string> code;
  std::optional<long> count;
  ResponseIssue issue = ResponseIssue::None;
};

ParsedResponse parse_response(std::string_view raw);

struct ChatRequest {
  std::string model{kDefaultModel};
  Prompt prompt;
  Parameters parameters;
};

/// OpenAI-compatible chat-completions body for `request`.
std::string request_body(const ChatRequest& request);
/// choices[0].message.content of a chat-completions response body.
std::optional<std::string> response_content(std::string_view body);

enum class ProviderStatus { Ok, RateLimited, ServerError, ClientError, NetworkError, MissingReplay };
std::string_view to_string(ProviderStatus status);

struct ProviderResult {
  ProviderStatus status = ProviderStatus::Ok;
  int http_status = 0;
  std::string text;   // completion text when Ok
  std::string error;  // diagnostic otherwise

  bool retryable() const;
};

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual ProviderResult complete(const ChatRequest& request) = 0;
};

struct HttpSettings {
  std::string base_url;  // scheme://host[:port], optionally with a path prefix
  std::string api_key;
  std::chrono::seconds timeout{120};

  /// PYIDIOM_LLM_ENDPOINT / PYIDIOM_LLM_API_KEY, falling back to
  /// OPENAI_BASE_URL / OPENAI_API_KEY.
  static HttpSettings from_environment();
};

class HttpProvider : public CompletionProvider {
 public:
  explicit HttpProvider(HttpSettings settings);
  ProviderResult complete(const ChatRequest& request) override;

 private:
  HttpSettings settings_;
};

/// Content-addressed store: one JSON file per exchange, named by the
/// SHA-256 of the canonical request.
class ReplayStore {
 public:
  explicit ReplayStore(std::filesystem::path directory);

  static std::string key(const ChatRequest& request);
  std::optional<std::string> lookup(const ChatRequest& request) const;
  void store(const ChatRequest& request, std::string_view response);
  const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path directory_;
  mutable std::mutex mutex_;
};

class ReplayProvider : public CompletionProvider {
 public:
  explicit ReplayProvider(const ReplayStore& store) : store_(store) {}
  ProviderResult complete(const ChatRequest& request) override;

 private:
  const ReplayStore& store_;
};

/// Forwards to `inner` and persists every successful response.
class RecordingProvider : public CompletionProvider {
 public:
  RecordingProvider(CompletionProvider& inner, ReplayStore& store) : inner_(inner), store_(store) {}
  ProviderResult complete(const ChatRequest& request) override;

 private:
  CompletionProvider& inner_;
  ReplayStore& store_;
};

struct RetryPolicy {
  int max_attempts = 5;
  double initial_backoff = 1.0;  // seconds
  double multiplier = 2.0;
  double max_backoff = 30.0;

  double backoff(int retry) const;  // delay before retry number `retry` (1-based)
};

class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;
  TokenBucket(double rate_per_second, double burst);
  void acquire();

 private:
  double rate_;
  double burst_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mutex_;
};

struct BatchOptions {
  std::string model{kDefaultModel};
  Parameters parameters;
  RetryPolicy retry;
  std::size_t concurrency = 4;
  double requests_per_second = 0.0;  // 0 disables rate limiting
  std::function<void(double)> sleep;  // seconds; defaults to a real sleep
  std::function<void(const std::string&)> log;
};

enum class ExchangeStatus { Ok, ProviderUnavailable, MissingReplay, Rejected };
std::string_view to_string(ExchangeStatus status);

struct PromptExchange {
  std::string method_id;
  IdiomKind idiom = IdiomKind::ListComp;
  std::string system_prompt;
  std::string user_prompt;
  std::string raw_response;
  std::optional<std::string> parsed_code;
  std::optional<long> parsed_count;
  ResponseIssue issue = ResponseIssue::None;
  std::string model_id;
  Parameters parameters;
  ExchangeStatus status = ExchangeStatus::Ok;
  int retries = 0;
  std::string error;
};

/// One exchange per record, in input order. Individual failures are
/// recorded on the exchange and never abort the batch.
std::vector<PromptExchange> run_idiom_batch(std::span<const bench::BenchRecord> records,
                                            CompletionProvider& provider, IdiomKind idiom,
                                            const BatchOptions& options = {});

}  // namespace pyidiom::llm
