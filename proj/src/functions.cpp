#include "wikitools/functions.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_set>

namespace wikitools {

ValueTable::ValueTable(std::size_t columns) : columns_(columns) {
    if (columns_ == 0) {
        throw ToolkitError(ErrorKind::bad_input, "a table needs at least one column");
    }
}

ValueTable ValueTable::column(std::vector<std::string> values) {
    ValueTable table(1);
    for (auto& value : values) {
        table.rows_.push_back({std::move(value)});
    }
    return table;
}

void ValueTable::add_row(std::vector<std::string> row) {
    if (row.size() != columns_) {
        throw ToolkitError(ErrorKind::bad_input, "row has " + std::to_string(row.size()) + " cells, table has " +
                                                     std::to_string(columns_) + " columns");
    }
    rows_.push_back(std::move(row));
}

const std::string& ValueTable::at(std::size_t row, std::size_t column) const {
    return rows_.at(row).at(column);
}

std::vector<std::string> ValueTable::column_values(std::size_t column) const {
    std::vector<std::string> values;
    values.reserve(rows_.size());
    for (const auto& row : rows_) {
        values.push_back(row.at(column));
    }
    return values;
}

std::string format_decimal(double value) {
    // Fixed notation of extreme doubles runs to ~330 characters.
    char buffer[512];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::fixed);
    return std::string(buffer, result.ptr);
}

ValueTable series_table(const DailyCountSeries& series) {
    ValueTable table(2);
    for (const auto& point : series.points()) {
        table.add_row({point.date.iso(), std::to_string(point.count)});
    }
    return table;
}

ValueTable titles_table(const std::vector<QualifiedTitle>& titles) {
    ValueTable table(1);
    for (const auto& title : titles) {
        table.add_row({title.to_string()});
    }
    return table;
}

namespace {

std::vector<QualifiedTitle> filter_languages(std::vector<QualifiedTitle> links,
                                             const std::optional<std::vector<LanguageCode>>& targets) {
    if (!targets) {
        return links;
    }
    std::erase_if(links, [&](const QualifiedTitle& link) {
        return std::find(targets->begin(), targets->end(), link.language()) == targets->end();
    });
    return links;
}

std::pair<Date, Date> resolve_window(std::optional<Date> start, std::optional<Date> end) {
    const auto [default_start, default_end] = default_window();
    const Date last = end.value_or(default_end);
    const Date first = start.value_or(end ? last - 29 : default_start);
    return {first, last};
}

}  // namespace

Toolkit::Toolkit(const MediaWikiClient& mediawiki, const WikidataClient& wikidata, const PageviewsClient& pageviews)
    : mediawiki_(mediawiki), wikidata_(wikidata), pageviews_(pageviews) {}

ValueTable Toolkit::wiki_translate(std::string_view article,
                                   const std::optional<std::vector<LanguageCode>>& target_languages) const {
    const auto source = parse_qualified(article);
    return titles_table(filter_languages(mediawiki_.langlinks(source), target_languages));
}

ValueTable Toolkit::wiki_synonyms(std::string_view article) const {
    return titles_table(mediawiki_.backlinks(parse_qualified(article), true).titles());
}

ValueTable Toolkit::wiki_expand(std::string_view article,
                                const std::optional<std::vector<LanguageCode>>& target_languages) const {
    const auto source = parse_qualified(article);
    TitleList expanded;
    const auto source_synonyms = mediawiki_.backlinks(source, true);
    for (const auto& synonym : source_synonyms.titles()) {
        expanded.add(synonym);
    }
    for (const auto& translation : filter_languages(mediawiki_.langlinks(source), target_languages)) {
        expanded.add(translation);
        if (translation.is_category()) {
            continue;
        }
        const auto synonyms = mediawiki_.backlinks(translation, true);
        for (const auto& synonym : synonyms.titles()) {
            expanded.add(synonym);
        }
    }
    return titles_table(expanded.titles());
}

ValueTable Toolkit::wiki_category_members(std::string_view category) const {
    return titles_table(mediawiki_.category_members(parse_qualified(category), MemberKind::pages).titles());
}

ValueTable Toolkit::wiki_subcategories(std::string_view category) const {
    return titles_table(mediawiki_.category_members(parse_qualified(category), MemberKind::subcategories).titles());
}

ValueTable Toolkit::wiki_inbound_links(std::string_view article) const {
    return titles_table(mediawiki_.backlinks(parse_qualified(article), false).titles());
}

ValueTable Toolkit::wiki_outbound_links(std::string_view article) const {
    return titles_table(mediawiki_.outbound_links(parse_qualified(article)).titles());
}

ValueTable Toolkit::wiki_mutual_links(std::string_view article) const {
    const auto source = parse_qualified(article);
    const auto inbound = mediawiki_.backlinks(source, false);
    const auto outbound = mediawiki_.outbound_links(source);
    std::vector<QualifiedTitle> mutual;
    for (const auto& link : outbound.titles()) {
        if (inbound.contains(link)) {
            mutual.push_back(link);
        }
    }
    return titles_table(mutual);
}

ValueTable Toolkit::wiki_geocoordinates(std::string_view article) const {
    const auto source = parse_qualified(article);
    ValueTable table(2);
    try {
        const auto coordinate = mediawiki_.geocoordinates(source);
        table.add_row({format_decimal(coordinate.latitude), format_decimal(coordinate.longitude)});
    } catch (const ToolkitError& e) {
        if (e.kind() != ErrorKind::not_found) {
            throw;
        }
    }
    return table;
}

ValueTable Toolkit::wiki_data_facts(std::string_view article) const {
    ValueTable table(2);
    for (auto& fact : wikidata_.facts(parse_qualified(article))) {
        table.add_row({std::move(fact.predicate), std::move(fact.object)});
    }
    return table;
}

ValueTable Toolkit::wiki_pageviews(std::string_view article, std::optional<Date> start,
                                   std::optional<Date> end) const {
    const auto source = parse_qualified(article);
    const auto [first, last] = resolve_window(start, end);
    return series_table(pageviews_.daily_views(source, first, last));
}

ValueTable Toolkit::wiki_page_edits(std::string_view article, std::optional<Date> start,
                                    std::optional<Date> end) const {
    const auto source = parse_qualified(article);
    const auto [first, last] = resolve_window(start, end);
    return series_table(mediawiki_.daily_edit_counts(source, first, last));
}

}  // namespace wikitools
