#include "chartlens/http_util.hpp"

#include <httplib.h>

#include <thread>

#include "chartlens/error.hpp"

namespace chartlens::http {

std::string Endpoint::path(std::string_view suffix) const {
  std::string out = path_prefix;
  if (!out.empty() && out.back() == '/') out.pop_back();
  if (suffix.empty() || suffix.front() != '/') out.push_back('/');
  out.append(suffix);
  return out;
}

Endpoint parse_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw InputError("URL needs a scheme: " + std::string(url));
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw InputError("unsupported URL scheme: " + std::string(url));
  const auto rest_start = scheme_end + 3;
  const auto slash = url.find('/', rest_start);
  Endpoint ep;
  if (slash == std::string_view::npos) {
    ep.origin = std::string(url);
  } else {
    ep.origin = std::string(url.substr(0, slash));
    ep.path_prefix = std::string(url.substr(slash));
  }
  if (ep.origin.size() <= rest_start) throw InputError("URL has no host: " + std::string(url));
  return ep;
}

Response post_json(const Endpoint& endpoint, std::string_view suffix, const std::string& body,
                   const Headers& headers, std::chrono::milliseconds timeout) {
  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);
  Response out;
  auto res = client.Post(endpoint.path(suffix), hdrs, body, "application/json");
  if (!res) {
    out.error = httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

InFlightLimiter::InFlightLimiter(int max_in_flight) : available_(std::max(max_in_flight, 1)) {}

InFlightLimiter::Permit::Permit(InFlightLimiter& owner) : owner_(owner) {
  std::unique_lock lock(owner_.mu_);
  owner_.cv_.wait(lock, [&] { return owner_.available_ > 0; });
  --owner_.available_;
}

InFlightLimiter::Permit::~Permit() {
  {
    std::lock_guard lock(owner_.mu_);
    ++owner_.available_;
  }
  owner_.cv_.notify_one();
}

TokenBucket::TokenBucket(double tokens_per_second, double burst)
    : rate_(tokens_per_second), capacity_(std::max(burst, 1.0)), tokens_(capacity_),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
  if (rate_ <= 0) return;
  std::unique_lock lock(mu_);
  while (true) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
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

Response post_with_retry(const Endpoint& endpoint, std::string_view suffix, const std::string& body,
                         const Headers& headers, std::chrono::milliseconds timeout, int retries) {
  Response res;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    res = post_json(endpoint, suffix, body, headers, timeout);
    if (res.ok() || !res.transient()) return res;
  }
  return res;
}

}  // namespace chartlens::http
