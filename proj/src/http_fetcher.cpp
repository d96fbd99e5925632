#include "httplib.h"
#include "wikitools/core.hpp"
#include "wikitools/transport.hpp"

namespace wikitools {

namespace {

class HttplibFetcher final : public HttpFetcher {
  public:
    explicit HttplibFetcher(std::chrono::seconds timeout) : timeout_(timeout) {}

    HttpResponse get(const HttpRequestSpec& spec, const std::string& user_agent) override {
        const auto scheme_end = spec.url.find("://");
        const auto path_start = spec.url.find('/', scheme_end + 3);
        const std::string origin = spec.url.substr(0, path_start);
        const std::string target = path_start == std::string::npos ? "/" : spec.url.substr(path_start);

        httplib::Client client(origin);
        client.set_follow_location(true);
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        const httplib::Headers headers{
            {"User-Agent", user_agent},
            {"Accept", spec.accept == Accept::json ? "application/json" : "application/xml"},
        };
        auto result = client.Get(target, headers);
        if (!result) {
            throw ToolkitError(ErrorKind::network, httplib::to_string(result.error()), spec.url);
        }
        return HttpResponse{result->status, result->get_header_value("Content-Type"), result->body};
    }

  private:
    std::chrono::seconds timeout_;
};

}  // namespace

std::shared_ptr<HttpFetcher> make_live_fetcher(std::chrono::seconds timeout) {
    return std::make_shared<HttplibFetcher>(timeout);
}

}  // namespace wikitools
