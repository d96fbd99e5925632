#include "wikitools/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

namespace wikitools {

namespace {

// Runs fn(0..count-1) on a few threads. Exceptions escaping fn are rethrown
// after all work finished, lowest index first, so the reported failure does
// not depend on scheduling.
template <typename Fn>
void for_each_index(std::size_t count, std::size_t workers, Fn fn) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> threads;
    for (std::size_t t = 1; t < std::min(std::max<std::size_t>(workers, 1), count); ++t) {
        threads.emplace_back(work);
    }
    work();
    threads.clear();
    for (const auto& error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }
}

// Skip-and-continue policy: caller mistakes always propagate, upstream
// failures only under fail_fast.
void maybe_rethrow(const ToolkitError& e, const ScenarioOptions& options) {
    if (options.fail_fast || e.kind() == ErrorKind::bad_input) {
        throw;
    }
}

std::string replace_all(std::string_view text, std::string_view placeholder, std::string_view value) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        const auto found = text.find(placeholder, pos);
        if (found == std::string_view::npos) {
            out += text.substr(pos);
            return out;
        }
        out += text.substr(pos, found - pos);
        out += value;
        pos = found + placeholder.size();
    }
}

std::string fill_template(std::string_view text, std::string_view title, std::string_view fact) {
    return replace_all(replace_all(text, "{title}", title), "{fact}", fact);
}

std::optional<std::string> find_fact(const std::vector<FactPair>& facts, std::string_view predicate) {
    for (const auto& fact : facts) {
        if (fact.predicate == predicate) {
            return fact.object;
        }
    }
    return std::nullopt;
}

}  // namespace

ValueTable scenario_category_panel(const Toolkit& toolkit, std::string_view category, Date start, Date end,
                                   std::size_t top_n, const ScenarioOptions& options) {
    if (top_n == 0) {
        throw ToolkitError(ErrorKind::bad_input, "top_n must be at least 1");
    }
    const auto members = toolkit.mediawiki().category_members(parse_qualified(category), MemberKind::pages).titles();

    std::vector<std::optional<std::uint64_t>> views(members.size());
    for_each_index(members.size(), options.workers, [&](std::size_t i) {
        try {
            views[i] = toolkit.pageviews().total_views(members[i], start, end);
        } catch (const ToolkitError& e) {
            if (e.kind() == ErrorKind::not_found) {
                views[i] = 0;
                return;
            }
            maybe_rethrow(e, options);
        }
    });

    std::vector<std::size_t> order(members.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (views[a].has_value() != views[b].has_value()) {
            return views[a].has_value();
        }
        if (views[a] && *views[a] != *views[b]) {
            return *views[a] > *views[b];
        }
        return members[a].to_string() < members[b].to_string();
    });
    order.resize(std::min(top_n, order.size()));

    std::vector<std::string> images(order.size());
    for_each_index(order.size(), options.workers, [&](std::size_t rank) {
        try {
            images[rank] = find_fact(toolkit.wikidata().facts(members[order[rank]]), "image").value_or("");
        } catch (const ToolkitError& e) {
            if (e.kind() != ErrorKind::not_found) {
                maybe_rethrow(e, options);
            }
        }
    });

    ValueTable table(4);
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const auto& count = views[order[rank]];
        table.add_row({std::to_string(rank + 1), members[order[rank]].to_string(),
                       count ? std::to_string(*count) : std::string{}, images[rank]});
    }
    return table;
}

ValueTable scenario_search_ads(const Toolkit& toolkit, std::string_view category, std::string_view fact_predicate,
                               std::string_view keyword_suffix, std::string_view headline_template,
                               std::string_view description_template, const ScenarioOptions& options) {
    for (const auto text : {headline_template, description_template}) {
        if (text.find("{title}") == std::string_view::npos && text.find("{fact}") == std::string_view::npos) {
            throw ToolkitError(ErrorKind::bad_input, "template '" + std::string(text) +
                                                         "' has neither a {title} nor a {fact} placeholder");
        }
    }
    const auto members = toolkit.mediawiki().category_members(parse_qualified(category), MemberKind::pages).titles();

    struct Ad {
        std::optional<std::string> fact;
        std::string keywords;
    };
    std::vector<Ad> ads(members.size());
    for_each_index(members.size(), options.workers, [&](std::size_t i) {
        try {
            ads[i].fact = find_fact(toolkit.wikidata().facts(members[i]), fact_predicate);
        } catch (const ToolkitError& e) {
            if (e.kind() != ErrorKind::not_found) {
                maybe_rethrow(e, options);
            }
            return;
        }
        if (!ads[i].fact) {
            return;
        }
        try {
            std::string keywords;
            const auto synonyms = toolkit.mediawiki().backlinks(members[i], true);
            for (const auto& synonym : synonyms.titles()) {
                if (!keywords.empty()) {
                    keywords += ", ";
                }
                keywords += synonym.title();
                keywords += ' ';
                keywords += keyword_suffix;
            }
            ads[i].keywords = std::move(keywords);
        } catch (const ToolkitError& e) {
            maybe_rethrow(e, options);
        }
    });

    ValueTable table(4);
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!ads[i].fact) {
            continue;
        }
        const auto& title = members[i].title();
        table.add_row({members[i].to_string(), fill_template(headline_template, title, *ads[i].fact),
                       fill_template(description_template, title, *ads[i].fact), ads[i].keywords});
    }
    return table;
}

std::optional<double> CampaignRow::pre_mean() const {
    if (!pre_total || pre_days == 0) {
        return std::nullopt;
    }
    return static_cast<double>(*pre_total) / pre_days;
}

std::optional<double> CampaignRow::post_mean() const {
    if (!post_total || post_days == 0) {
        return std::nullopt;
    }
    return static_cast<double>(*post_total) / post_days;
}

std::optional<double> CampaignRow::ratio() const {
    const auto pre = pre_mean();
    const auto post = post_mean();
    if (!pre || !post || *pre == 0.0) {
        return std::nullopt;
    }
    return *post / *pre;
}

std::vector<CampaignRow> campaign_rows(const Toolkit& toolkit, std::string_view article, Date start, Date end,
                                       Date event_date, const ScenarioOptions& options) {
    if (!(start <= event_date && event_date <= end)) {
        throw ToolkitError(ErrorKind::bad_input, "event date " + event_date.iso() + " is outside " + start.iso() +
                                                     ".." + end.iso());
    }
    if (start < pageviews_epoch) {
        throw ToolkitError(ErrorKind::bad_input, "no pageview data before " + pageviews_epoch.iso());
    }
    const auto source = parse_qualified(article);
    std::vector<QualifiedTitle> titles{source};
    for (auto& translation : toolkit.mediawiki().langlinks(source)) {
        titles.push_back(std::move(translation));
    }

    std::vector<CampaignRow> rows(titles.size());
    for_each_index(titles.size(), options.workers, [&](std::size_t i) {
        auto& row = rows[i];
        row.language = titles[i].language().str();
        row.pre_days = event_date.days_since(start);
        row.post_days = inclusive_day_count(event_date, end);
        try {
            const auto series = toolkit.pageviews().daily_views(titles[i], start, end);
            std::uint64_t pre = 0;
            std::uint64_t post = 0;
            for (const auto& point : series.points()) {
                (point.date < event_date ? pre : post) += point.count;
            }
            row.pre_total = pre;
            row.post_total = post;
        } catch (const ToolkitError& e) {
            if (e.kind() != ErrorKind::not_found) {
                maybe_rethrow(e, options);
            }
        }
    });
    return rows;
}

ValueTable campaign_table(const std::vector<CampaignRow>& rows) {
    const auto text = [](std::optional<double> value) { return value ? format_decimal(*value) : std::string{}; };
    ValueTable table(4);
    for (const auto& row : rows) {
        table.add_row({row.language, text(row.pre_mean()), text(row.post_mean()), text(row.ratio())});
    }
    return table;
}

ValueTable scenario_campaign(const Toolkit& toolkit, std::string_view article, Date start, Date end, Date event_date,
                             const ScenarioOptions& options) {
    return campaign_table(campaign_rows(toolkit, article, start, end, event_date, options));
}

}  // namespace wikitools
