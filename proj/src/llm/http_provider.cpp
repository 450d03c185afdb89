#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "pyidiom/llm.hpp"

namespace pyidiom::llm {

HttpProvider::HttpProvider(HttpSettings settings) : settings_(std::move(settings)) {}

ProviderResult HttpProvider::complete(const ChatRequest& request) {
  const std::string& url = settings_.base_url;
  const std::size_t scheme_end = url.find("://");
  const std::size_t path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(origin);
  if (!client.is_valid()) return ProviderResult{ProviderStatus::ClientError, 0, {}, "invalid endpoint " + url};
  client.set_connection_timeout(settings_.timeout);
  client.set_read_timeout(settings_.timeout);
  client.set_write_timeout(settings_.timeout);
  httplib::Headers headers;
  if (!settings_.api_key.empty()) headers.emplace("Authorization", "Bearer " + settings_.api_key);

  const auto response = client.Post(prefix + "/chat/completions", headers, request_body(request), "application/json");
  if (!response) {
    return ProviderResult{ProviderStatus::NetworkError, 0, {}, httplib::to_string(response.error())};
  }
  const int status = response->status;
  if (status == 429) return ProviderResult{ProviderStatus::RateLimited, status, {}, response->body};
  if (status >= 500) return ProviderResult{ProviderStatus::ServerError, status, {}, response->body};
  if (status < 200 || status >= 300) return ProviderResult{ProviderStatus::ClientError, status, {}, response->body};
  auto content = response_content(response->body);
  if (!content) return ProviderResult{ProviderStatus::ServerError, status, {}, "malformed completion body"};
  return ProviderResult{ProviderStatus::Ok, status, std::move(*content), {}};
}

}  // namespace pyidiom::llm
