#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chartlens::http {

/// "https://api.example.com/v1" -> origin "https://api.example.com", prefix "/v1".
struct Endpoint {
  std::string origin;
  std::string path_prefix;

  std::string path(std::string_view suffix) const;
};

/// Throws InputError for URLs without an http/https scheme.
Endpoint parse_url(std::string_view url);

struct Response {
  int status = 0;      // 0 when the transport failed
  std::string body;
  std::string error;   // transport error description

  bool ok() const noexcept { return status >= 200 && status < 300; }
  bool transient() const noexcept { return status == 0 || status == 429 || status >= 500; }
};

using Headers = std::vector<std::pair<std::string, std::string>>;

Response post_json(const Endpoint& endpoint, std::string_view suffix, const std::string& body,
                   const Headers& headers, std::chrono::milliseconds timeout);

/// Bounds the number of concurrent requests.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(int max_in_flight);

  class Permit {
   public:
    explicit Permit(InFlightLimiter& owner);
    ~Permit();
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;

   private:
    InFlightLimiter& owner_;
  };

  Permit acquire() { return Permit(*this); }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int available_;
};

/// Classic token bucket; acquire() blocks until a token is available.
class TokenBucket {
 public:
  TokenBucket(double tokens_per_second, double burst);
  void acquire();

 private:
  std::mutex mu_;
  double rate_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

/// POST with one retry policy shared by all remote clients: transport
/// failures, 429 and 5xx are retried up to `retries` extra times.
Response post_with_retry(const Endpoint& endpoint, std::string_view suffix, const std::string& body,
                         const Headers& headers, std::chrono::milliseconds timeout, int retries);

}  // namespace chartlens::http
