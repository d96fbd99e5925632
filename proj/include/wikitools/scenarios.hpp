#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wikitools/date.hpp"
#include "wikitools/functions.hpp"

namespace wikitools {

/// Multi-article recipes skip failing members (empty fields) unless
/// fail_fast is set, in which case the first failure is rethrown.
struct ScenarioOptions {
    bool fail_fast = false;
    /// Worker threads for the per-article fan-out.
    std::size_t workers = 4;
};

/// Columns rank, title, views, image. Members are ranked by total views
/// over [start, end], highest first, ties alphabetical by title. A member
/// without pageview data counts 0 views; a member whose lookup failed has
/// empty views and is ranked last. image is the member's "image" fact or "".
ValueTable scenario_category_panel(const Toolkit& toolkit, std::string_view category, Date start, Date end,
                                   std::size_t top_n, const ScenarioOptions& options = {});

/// Columns title, headline, description, keywords. `{title}` and `{fact}`
/// in the templates are replaced by the member's title and the object of
/// its `fact_predicate` fact; members without that fact are left out.
/// keywords joins "<synonym> <keyword_suffix>" for every synonym with ", ".
ValueTable scenario_search_ads(const Toolkit& toolkit, std::string_view category, std::string_view fact_predicate,
                               std::string_view keyword_suffix, std::string_view headline_template,
                               std::string_view description_template, const ScenarioOptions& options = {});

struct CampaignRow {
    std::string language;
    /// Days in [start, event_date) and [event_date, end].
    int pre_days = 0;
    int post_days = 0;
    /// Absent when the language has no pageview data.
    std::optional<std::uint64_t> pre_total;
    std::optional<std::uint64_t> post_total;

    [[nodiscard]] std::optional<double> pre_mean() const;
    [[nodiscard]] std::optional<double> post_mean() const;
    /// post_mean / pre_mean; absent when either is absent or pre_mean is 0.
    [[nodiscard]] std::optional<double> ratio() const;
};

/// The source article followed by each translation, one row per language.
std::vector<CampaignRow> campaign_rows(const Toolkit& toolkit, std::string_view article, Date start, Date end,
                                       Date event_date, const ScenarioOptions& options = {});

/// Columns language, pre, post, ratio; missing values are "".
ValueTable campaign_table(const std::vector<CampaignRow>& rows);

ValueTable scenario_campaign(const Toolkit& toolkit, std::string_view article, Date start, Date end, Date event_date,
                             const ScenarioOptions& options = {});

}  // namespace wikitools
