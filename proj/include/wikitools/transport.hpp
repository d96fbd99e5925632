#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wikitools {

enum class HttpMethod { get };
enum class Accept { json, xml };

using QueryParams = std::vector<std::pair<std::string, std::string>>;

/// RFC 3986 percent-encoding; only unreserved characters pass through.
std::string percent_encode(std::string_view text);
/// Decodes `%XX` escapes; `+` decodes to a space.
std::string percent_decode(std::string_view text);

/// `base?k=v&...` with every key and value encoded and keys sorted.
std::string build_url(std::string_view base, const QueryParams& params);

/// Re-encodes and sorts the query component so that URLs differing only in
/// parameter order or escape spelling compare equal.
std::string canonicalize_url(std::string_view url);

/// Host part of an absolute URL (`en.wikipedia.org`, `127.0.0.1:8080`).
std::string url_host(std::string_view url);

struct HttpRequestSpec {
    HttpMethod method = HttpMethod::get;
    std::string url;
    Accept accept = Accept::json;

    /// Validates the scheme and canonicalizes the URL. Plain http is only
    /// accepted for loopback hosts (local stub servers).
    static HttpRequestSpec get(std::string_view url, Accept accept = Accept::json);
};

/// Lowercase hex SHA-256 of `METHOD + " " + canonical url`.
std::string canonical_key(const HttpRequestSpec& spec);

std::string sha256_hex(std::string_view data);

struct HttpResponse {
    int status = 0;
    std::string content_type;
    std::string body;
};

/// Live HTTP layer. Implementations throw ToolkitError(network) on transport
/// failure and return every HTTP status as-is.
class HttpFetcher {
  public:
    virtual ~HttpFetcher() = default;
    virtual HttpResponse get(const HttpRequestSpec& spec, const std::string& user_agent) = 0;
};

std::shared_ptr<HttpFetcher> make_live_fetcher(std::chrono::seconds timeout = std::chrono::seconds{30});

/// Fetcher for hermetic runs: any call is a Network error.
class DisabledFetcher final : public HttpFetcher {
  public:
    HttpResponse get(const HttpRequestSpec& spec, const std::string& user_agent) override;
    [[nodiscard]] int attempts() const noexcept { return attempts_.load(); }

  private:
    std::atomic<int> attempts_{0};
};

enum class FixtureMode { replay, record, passthrough };

std::optional<FixtureMode> parse_fixture_mode(std::string_view text);
std::string_view to_string(FixtureMode mode);

/// One recorded request/response pair, stored as `<key>.json`.
struct FixtureEnvelope {
    std::string key;
    std::string method;
    std::string url;
    int status = 0;
    std::string content_type;
    std::string body;

    [[nodiscard]] std::string serialize() const;
    static FixtureEnvelope deserialize(std::string_view text);
};

class FixtureArchive {
  public:
    explicit FixtureArchive(std::filesystem::path root);

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
    [[nodiscard]] std::filesystem::path path_for(std::string_view key) const;
    [[nodiscard]] std::optional<FixtureEnvelope> find(std::string_view key) const;
    void store(const FixtureEnvelope& envelope) const;

  private:
    std::filesystem::path root_;
};

struct RateLimitPolicy {
    double max_requests_per_second = 5.0;
    int max_concurrent_per_host = 2;
};

/// Request spacing across all hosts plus a per-host concurrency cap.
class RateLimiter {
  public:
    explicit RateLimiter(RateLimitPolicy policy);

    class Permit {
      public:
        Permit(RateLimiter* owner, std::string host) : owner_(owner), host_(std::move(host)) {}
        Permit(Permit&& other) noexcept : owner_(std::exchange(other.owner_, nullptr)), host_(std::move(other.host_)) {}
        Permit(const Permit&) = delete;
        Permit& operator=(const Permit&) = delete;
        Permit& operator=(Permit&&) = delete;
        ~Permit();

      private:
        RateLimiter* owner_;
        std::string host_;
    };

    /// Blocks until both a host slot and a rate slot are free.
    Permit acquire(const std::string& host);

    [[nodiscard]] const RateLimitPolicy& policy() const noexcept { return policy_; }

  private:
    void release(const std::string& host);

    RateLimitPolicy policy_;
    std::mutex mutex_;
    std::condition_variable slot_freed_;
    std::map<std::string, int> in_flight_;
    std::chrono::steady_clock::time_point next_slot_{};
};

struct TransportConfig {
    FixtureMode mode = FixtureMode::passthrough;
    std::filesystem::path archive_root;
    std::string user_agent = "wikitools/1.0 (Wikipedia spreadsheet-function toolkit; C++)";
    RateLimitPolicy rate_limit;
    std::chrono::milliseconds backoff_base{500};
};

struct FetchResult {
    int status = 0;
    std::string body;
};

/// The single network entry point. Thread safe: an in-memory cache keyed by
/// canonical_key collapses duplicate requests (including concurrent ones)
/// into one fetch per run.
class Transport {
  public:
    Transport(TransportConfig config, std::shared_ptr<HttpFetcher> fetcher);

    /// Throws UpstreamStatus on non-2xx, NotFound on a replay miss,
    /// RateLimited when a 429 persists after the retry.
    FetchResult fetch(const HttpRequestSpec& spec);

    [[nodiscard]] const TransportConfig& config() const noexcept { return config_; }
    /// Requests that reached the live fetcher, retries included.
    [[nodiscard]] int live_fetches() const noexcept { return live_fetches_.load(); }
    /// Calls to fetch(), cache hits included.
    [[nodiscard]] int requests() const noexcept { return requests_.load(); }

  private:
    FetchResult fetch_uncached(const HttpRequestSpec& spec, const std::string& key);
    HttpResponse fetch_live(const HttpRequestSpec& spec);

    TransportConfig config_;
    std::shared_ptr<HttpFetcher> fetcher_;
    std::optional<FixtureArchive> archive_;
    RateLimiter limiter_;
    std::mutex cache_mutex_;
    std::map<std::string, std::shared_future<FetchResult>> cache_;
    std::atomic<int> live_fetches_{0};
    std::atomic<int> requests_{0};
};

}  // namespace wikitools
