#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "wikitools/core.hpp"
#include "wikitools/date.hpp"
#include "wikitools/transport.hpp"

namespace wikitools {

/// First day the per-article endpoint has data for.
inline const Date pageviews_epoch{2015, 7, 1};

struct PageviewsConfig {
    std::string endpoint = "https://wikimedia.org/api/rest_v1";
    std::string access = "all-access";
    /// `user` leaves out spider and automated traffic.
    std::string agent = "user";
};

/// The 30 days ending yesterday (UTC).
std::pair<Date, Date> default_window(Date today = Date::today_utc());

class PageviewsClient {
  public:
    PageviewsClient(Transport& transport, PageviewsConfig config = {});

    [[nodiscard]] std::string request_url(const QualifiedTitle& article, Date start, Date end) const;

    /// Dense daily series; days the API omits are 0. An upstream 404 (no
    /// data for the article) is NotFound.
    DailyCountSeries daily_views(const QualifiedTitle& article, Date start, Date end) const;
    std::uint64_t total_views(const QualifiedTitle& article, Date start, Date end) const;

    [[nodiscard]] const PageviewsConfig& config() const noexcept { return config_; }

  private:
    Transport& transport_;
    PageviewsConfig config_;
};

}  // namespace wikitools
