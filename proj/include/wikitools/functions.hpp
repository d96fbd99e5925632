#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wikitools/core.hpp"
#include "wikitools/date.hpp"
#include "wikitools/mediawiki.hpp"
#include "wikitools/pageviews.hpp"
#include "wikitools/wikidata.hpp"

namespace wikitools {

/// Rectangular table of strings; the shape a function result spills into.
class ValueTable {
  public:
    explicit ValueTable(std::size_t columns = 1);

    static ValueTable column(std::vector<std::string> values);

    /// Throws BadInput unless the row has exactly columns() entries.
    void add_row(std::vector<std::string> row);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }
    [[nodiscard]] std::size_t columns() const noexcept { return columns_; }
    [[nodiscard]] bool empty() const noexcept { return rows_.empty(); }
    [[nodiscard]] const std::vector<std::vector<std::string>>& data() const noexcept { return rows_; }
    [[nodiscard]] const std::string& at(std::size_t row, std::size_t column) const;
    /// Values of one column, top to bottom.
    [[nodiscard]] std::vector<std::string> column_values(std::size_t column) const;

    friend bool operator==(const ValueTable&, const ValueTable&) = default;

  private:
    std::size_t columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// The twelve spreadsheet functions over the three API clients. Arguments are
/// `language:Title` strings; failures are thrown as ToolkitError.
class Toolkit {
  public:
    Toolkit(const MediaWikiClient& mediawiki, const WikidataClient& wikidata, const PageviewsClient& pageviews);

    /// Language links, optionally restricted to `target_languages` (an empty
    /// list admits nothing).
    ValueTable wiki_translate(std::string_view article,
                              const std::optional<std::vector<LanguageCode>>& target_languages = std::nullopt) const;
    /// Redirects to the article.
    ValueTable wiki_synonyms(std::string_view article) const;
    /// Source synonyms first, then each admitted translation followed by that
    /// wiki's synonyms of it; duplicates dropped.
    ValueTable wiki_expand(std::string_view article,
                           const std::optional<std::vector<LanguageCode>>& target_languages = std::nullopt) const;
    ValueTable wiki_category_members(std::string_view category) const;
    ValueTable wiki_subcategories(std::string_view category) const;
    ValueTable wiki_inbound_links(std::string_view article) const;
    ValueTable wiki_outbound_links(std::string_view article) const;
    /// Outbound links that also link back, in outbound order.
    ValueTable wiki_mutual_links(std::string_view article) const;
    /// One row (latitude, longitude), or no rows when the page has none.
    ValueTable wiki_geocoordinates(std::string_view article) const;
    /// (predicate, object) rows.
    ValueTable wiki_data_facts(std::string_view article) const;
    /// (ISO date, views) rows; the default window applies to missing dates.
    ValueTable wiki_pageviews(std::string_view article, std::optional<Date> start = std::nullopt,
                              std::optional<Date> end = std::nullopt) const;
    ValueTable wiki_page_edits(std::string_view article, std::optional<Date> start = std::nullopt,
                               std::optional<Date> end = std::nullopt) const;

    [[nodiscard]] const MediaWikiClient& mediawiki() const noexcept { return mediawiki_; }
    [[nodiscard]] const WikidataClient& wikidata() const noexcept { return wikidata_; }
    [[nodiscard]] const PageviewsClient& pageviews() const noexcept { return pageviews_; }

  private:
    const MediaWikiClient& mediawiki_;
    const WikidataClient& wikidata_;
    const PageviewsClient& pageviews_;
};

ValueTable series_table(const DailyCountSeries& series);
ValueTable titles_table(const std::vector<QualifiedTitle>& titles);

/// Shortest decimal that parses back to the same double.
std::string format_decimal(double value);

}  // namespace wikitools
