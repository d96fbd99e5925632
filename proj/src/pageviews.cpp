#include "wikitools/pageviews.hpp"

#include <map>

#include "wikitools/mediawiki.hpp"

namespace wikitools {

std::pair<Date, Date> default_window(Date today) {
    const Date end = today - 1;
    return {end - 29, end};
}

PageviewsClient::PageviewsClient(Transport& transport, PageviewsConfig config)
    : transport_(transport), config_(std::move(config)) {}

std::string PageviewsClient::request_url(const QualifiedTitle& article, Date start, Date end) const {
    return config_.endpoint + "/metrics/pageviews/per-article/" + article.language().str() + ".wikipedia/" +
           percent_encode(config_.access) + "/" + percent_encode(config_.agent) + "/" +
           percent_encode(to_request_title(article)) + "/daily/" + start.compact() + "/" + end.compact();
}

DailyCountSeries PageviewsClient::daily_views(const QualifiedTitle& article, Date start, Date end) const {
    if (start > end) {
        throw ToolkitError(ErrorKind::bad_input, "start " + start.iso() + " is after end " + end.iso());
    }
    if (start < pageviews_epoch) {
        throw ToolkitError(ErrorKind::bad_input,
                           "pageviews start at " + pageviews_epoch.iso() + ", requested " + start.iso());
    }
    const auto spec = HttpRequestSpec::get(request_url(article, start, end));
    FetchResult result;
    try {
        result = transport_.fetch(spec);
    } catch (const ToolkitError& e) {
        if (e.http_status() == 404) {
            throw ToolkitError(ErrorKind::not_found, "no pageviews for " + article.to_string(), spec.url);
        }
        throw;
    }
    const auto response = parse_json_body(result.body, spec.url);
    const auto items = response.find("items");
    if (items == response.end() || !items->is_array()) {
        throw ToolkitError(ErrorKind::parse_failure, "response lacks items", spec.url);
    }
    std::map<Date, std::uint64_t> counts;
    for (const auto& item : *items) {
        const auto timestamp = item.find("timestamp");
        const auto views = item.find("views");
        if (timestamp == item.end() || !timestamp->is_string() || views == item.end() ||
            !views->is_number_unsigned()) {
            throw ToolkitError(ErrorKind::parse_failure, "malformed pageviews item", spec.url);
        }
        counts[Date::parse_compact(timestamp->get<std::string>())] += views->get<std::uint64_t>();
    }
    return DailyCountSeries::dense(start, end, counts);
}

std::uint64_t PageviewsClient::total_views(const QualifiedTitle& article, Date start, Date end) const {
    return daily_views(article, start, end).total();
}

}  // namespace wikitools
