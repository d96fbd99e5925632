#include "wikitools/transport.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "json.hpp"
#include "wikitools/core.hpp"

namespace wikitools {

namespace {

constexpr char hex_digits[] = "0123456789ABCDEF";

bool is_unreserved(unsigned char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
           c == '.' || c == '~';
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string lowercase(std::string_view text) {
    std::string out{text};
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Uppercases the hex digits of existing %XX escapes in a path.
std::string normalize_path_escapes(std::string_view path) {
    std::string out{path};
    for (std::size_t i = 0; i + 2 < out.size(); ++i) {
        if (out[i] == '%' && hex_value(out[i + 1]) >= 0 && hex_value(out[i + 2]) >= 0) {
            out[i + 1] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[i + 1])));
            out[i + 2] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[i + 2])));
            i += 2;
        }
    }
    return out;
}

bool is_loopback(std::string_view host) {
    const auto colon = host.rfind(':');
    std::string_view name = host;
    if (colon != std::string_view::npos && host.find(']') == std::string_view::npos) {
        name = host.substr(0, colon);
    } else if (!host.empty() && host.front() == '[') {
        name = host.substr(0, host.find(']') + 1);
    }
    return name == "localhost" || name == "127.0.0.1" || name == "[::1]";
}

}  // namespace

std::string percent_encode(std::string_view text) {
    std::string out;
    out.reserve(text.size() * 3);
    for (unsigned char c : text) {
        if (is_unreserved(c)) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex_digits[c >> 4];
            out += hex_digits[c & 0x0F];
        }
    }
    return out;
}

std::string percent_decode(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '%' && i + 2 < text.size() && hex_value(text[i + 1]) >= 0 &&
            hex_value(text[i + 2]) >= 0) {
            out += static_cast<char>(hex_value(text[i + 1]) * 16 + hex_value(text[i + 2]));
            i += 2;
        } else if (c == '+') {
            out += ' ';
        } else {
            out += c;
        }
    }
    return out;
}

std::string build_url(std::string_view base, const QueryParams& params) {
    std::vector<std::pair<std::string, std::string>> encoded;
    encoded.reserve(params.size());
    for (const auto& [key, value] : params) {
        encoded.emplace_back(percent_encode(key), percent_encode(value));
    }
    std::sort(encoded.begin(), encoded.end());
    std::string url{base};
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        url += i == 0 ? '?' : '&';
        url += encoded[i].first;
        url += '=';
        url += encoded[i].second;
    }
    return url;
}

std::string canonicalize_url(std::string_view url) {
    if (const auto hash = url.find('#'); hash != std::string_view::npos) {
        url = url.substr(0, hash);
    }
    const auto question = url.find('?');
    std::string base = normalize_path_escapes(url.substr(0, question));
    if (const auto scheme_end = base.find("://"); scheme_end != std::string::npos) {
        const auto host_end = base.find('/', scheme_end + 3);
        const auto authority_end = host_end == std::string::npos ? base.size() : host_end;
        base = lowercase(base.substr(0, authority_end)) + base.substr(authority_end);
    }
    if (question == std::string_view::npos) {
        return base;
    }
    QueryParams params;
    std::string_view query = url.substr(question + 1);
    std::size_t start = 0;
    while (start <= query.size()) {
        auto end = query.find('&', start);
        if (end == std::string_view::npos) {
            end = query.size();
        }
        const auto part = query.substr(start, end - start);
        if (!part.empty()) {
            const auto eq = part.find('=');
            if (eq == std::string_view::npos) {
                params.emplace_back(percent_decode(part), std::string{});
            } else {
                params.emplace_back(percent_decode(part.substr(0, eq)), percent_decode(part.substr(eq + 1)));
            }
        }
        start = end + 1;
    }
    return build_url(base, params);
}

std::string url_host(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        return {};
    }
    const auto host_start = scheme_end + 3;
    const auto host_end = url.find_first_of("/?#", host_start);
    return lowercase(url.substr(host_start, host_end == std::string_view::npos ? std::string_view::npos
                                                                                : host_end - host_start));
}

HttpRequestSpec HttpRequestSpec::get(std::string_view url, Accept accept) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        throw ToolkitError(ErrorKind::bad_input, "not an absolute URL: " + std::string(url));
    }
    const auto scheme = lowercase(url.substr(0, scheme_end));
    const auto host = url_host(url);
    if (host.empty()) {
        throw ToolkitError(ErrorKind::bad_input, "URL has no host: " + std::string(url));
    }
    if (scheme != "https" && !(scheme == "http" && is_loopback(host))) {
        throw ToolkitError(ErrorKind::bad_input, "only https URLs are fetched: " + std::string(url));
    }
    return HttpRequestSpec{HttpMethod::get, canonicalize_url(url), accept};
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char lower_hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out += lower_hex[digest[i] >> 4];
        out += lower_hex[digest[i] & 0x0F];
    }
    return out;
}

std::string canonical_key(const HttpRequestSpec& spec) {
    return sha256_hex("GET " + canonicalize_url(spec.url));
}

HttpResponse DisabledFetcher::get(const HttpRequestSpec& spec, const std::string&) {
    ++attempts_;
    throw ToolkitError(ErrorKind::network, "networking is disabled", spec.url);
}

std::optional<FixtureMode> parse_fixture_mode(std::string_view text) {
    if (text == "replay") return FixtureMode::replay;
    if (text == "record") return FixtureMode::record;
    if (text == "passthrough") return FixtureMode::passthrough;
    return std::nullopt;
}

std::string_view to_string(FixtureMode mode) {
    switch (mode) {
    case FixtureMode::replay: return "replay";
    case FixtureMode::record: return "record";
    case FixtureMode::passthrough: return "passthrough";
    }
    return "passthrough";
}

std::string FixtureEnvelope::serialize() const {
    nlohmann::ordered_json j;
    j["key"] = key;
    j["method"] = method;
    j["url"] = url;
    j["status"] = status;
    j["content_type"] = content_type;
    j["body"] = body;
    return j.dump(2) + "\n";
}

FixtureEnvelope FixtureEnvelope::deserialize(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        FixtureEnvelope envelope;
        envelope.key = j.at("key").get<std::string>();
        envelope.method = j.at("method").get<std::string>();
        envelope.url = j.at("url").get<std::string>();
        envelope.status = j.at("status").get<int>();
        envelope.content_type = j.value("content_type", std::string{});
        envelope.body = j.at("body").get<std::string>();
        return envelope;
    } catch (const nlohmann::json::exception& e) {
        throw ToolkitError(ErrorKind::parse_failure, std::string("bad fixture envelope: ") + e.what());
    }
}

FixtureArchive::FixtureArchive(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path FixtureArchive::path_for(std::string_view key) const {
    return root_ / (std::string(key) + ".json");
}

std::optional<FixtureEnvelope> FixtureArchive::find(std::string_view key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    auto envelope = FixtureEnvelope::deserialize(buffer.str());
    if (envelope.key != key) {
        throw ToolkitError(ErrorKind::parse_failure, "fixture " + path_for(key).string() + " carries key " +
                                                         envelope.key);
    }
    return envelope;
}

void FixtureArchive::store(const FixtureEnvelope& envelope) const {
    std::filesystem::create_directories(root_);
    const auto target = path_for(envelope.key);
    auto temp = target;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ToolkitError(ErrorKind::bad_input, "cannot write fixture " + temp.string());
        }
        out << envelope.serialize();
    }
    std::filesystem::rename(temp, target);
}

RateLimiter::RateLimiter(RateLimitPolicy policy) : policy_(policy) {
    if (!(policy_.max_requests_per_second > 0.0) || policy_.max_concurrent_per_host < 1) {
        throw ToolkitError(ErrorKind::bad_input, "rate limits must be positive");
    }
}

RateLimiter::Permit::~Permit() {
    if (owner_ != nullptr) {
        owner_->release(host_);
    }
}

RateLimiter::Permit RateLimiter::acquire(const std::string& host) {
    const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / policy_.max_requests_per_second));
    std::unique_lock lock(mutex_);
    slot_freed_.wait(lock, [&] { return in_flight_[host] < policy_.max_concurrent_per_host; });
    ++in_flight_[host];
    const auto slot = std::max(std::chrono::steady_clock::now(), next_slot_);
    next_slot_ = slot + interval;
    lock.unlock();
    std::this_thread::sleep_until(slot);
    return Permit(this, host);
}

void RateLimiter::release(const std::string& host) {
    {
        std::lock_guard lock(mutex_);
        --in_flight_[host];
    }
    slot_freed_.notify_all();
}

namespace {

FetchResult to_result(int status, std::string body, const std::string& url) {
    if (status >= 200 && status < 300) {
        return FetchResult{status, std::move(body)};
    }
    if (status == 429) {
        throw ToolkitError(ErrorKind::rate_limited, "HTTP 429 after retry", url);
    }
    throw ToolkitError::upstream(status, url);
}

// 404 is a content answer (e.g. "no pageviews for this article"), so it is
// recorded alongside successes; 5xx and 429 are transient and never stored.
bool is_recordable(int status) {
    return (status >= 200 && status < 300) || status == 404;
}

}  // namespace

Transport::Transport(TransportConfig config, std::shared_ptr<HttpFetcher> fetcher)
    : config_(std::move(config)),
      fetcher_(fetcher ? std::move(fetcher) : std::make_shared<DisabledFetcher>()),
      limiter_(config_.rate_limit) {
    if (config_.mode != FixtureMode::passthrough) {
        if (config_.archive_root.empty()) {
            throw ToolkitError(ErrorKind::bad_input, "fixture mode " + std::string(to_string(config_.mode)) +
                                                         " needs an archive directory");
        }
        if (config_.mode == FixtureMode::replay && !std::filesystem::is_directory(config_.archive_root)) {
            throw ToolkitError(ErrorKind::bad_input,
                               "fixture archive not found: " + config_.archive_root.string());
        }
        archive_.emplace(config_.archive_root);
    }
}

FetchResult Transport::fetch(const HttpRequestSpec& spec) {
    ++requests_;
    const auto key = canonical_key(spec);
    std::promise<FetchResult> promise;
    std::shared_future<FetchResult> pending;
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) {
            pending = it->second;
        } else {
            cache_.emplace(key, promise.get_future().share());
        }
    }
    if (pending.valid()) {
        return pending.get();
    }
    try {
        auto result = fetch_uncached(spec, key);
        promise.set_value(result);
        return result;
    } catch (...) {
        {
            std::lock_guard lock(cache_mutex_);
            cache_.erase(key);
        }
        promise.set_exception(std::current_exception());
        throw;
    }
}

FetchResult Transport::fetch_uncached(const HttpRequestSpec& spec, const std::string& key) {
    switch (config_.mode) {
    case FixtureMode::replay: {
        auto envelope = archive_->find(key);
        if (!envelope) {
            throw ToolkitError(ErrorKind::not_found, "no fixture for key " + key, spec.url);
        }
        return to_result(envelope->status, std::move(envelope->body), spec.url);
    }
    case FixtureMode::record: {
        auto response = fetch_live(spec);
        if (is_recordable(response.status)) {
            archive_->store(FixtureEnvelope{key, "GET", spec.url, response.status, response.content_type,
                                            response.body});
        }
        return to_result(response.status, std::move(response.body), spec.url);
    }
    case FixtureMode::passthrough: {
        auto response = fetch_live(spec);
        return to_result(response.status, std::move(response.body), spec.url);
    }
    }
    throw ToolkitError(ErrorKind::bad_input, "unknown fixture mode");
}

HttpResponse Transport::fetch_live(const HttpRequestSpec& spec) {
    const auto host = url_host(spec.url);
    for (int attempt = 0;; ++attempt) {
        HttpResponse response;
        {
            auto permit = limiter_.acquire(host);
            ++live_fetches_;
            response = fetcher_->get(spec, config_.user_agent);
        }
        const bool retryable = response.status == 429 || response.status == 503;
        if (!retryable || attempt >= 1) {
            return response;
        }
        std::this_thread::sleep_for(config_.backoff_base * (1 << attempt));
    }
}

}  // namespace wikitools
