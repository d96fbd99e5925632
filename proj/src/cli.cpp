#include "wikitools/cli.hpp"

#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "wikitools/formula.hpp"
#include "wikitools/scenarios.hpp"

namespace wikitools {

namespace {

struct GlobalOptions {
    std::string format = "tsv";
    std::string fixtures;
    std::string mode;
    std::string endpoint_wikipedia;
    std::string endpoint_wikidata;
    std::string endpoint_pageviews;
    std::string user_agent;
    double rate_limit = RateLimitPolicy{}.max_requests_per_second;
    int max_concurrent = RateLimitPolicy{}.max_concurrent_per_host;
    int max_pages = MediaWikiConfig{}.max_pages;
    std::string access = PageviewsConfig{}.access;
    std::string agent = PageviewsConfig{}.agent;
    bool fail_fast = false;
};

// Everything a subcommand needs once the clients exist.
struct Session {
    const Toolkit& toolkit;
    ScenarioOptions scenario;
};

using Action = std::function<ValueTable(const Session&)>;

template <typename Parse>
CLI::Validator parse_check(Parse parse, std::string description) {
    return CLI::Validator(
        [parse](std::string& value) {
            try {
                parse(value);
                return std::string{};
            } catch (const ToolkitError& e) {
                return e.detail();
            }
        },
        std::move(description));
}

const CLI::Validator& qualified_check() {
    static const auto check = parse_check([](const std::string& v) { parse_qualified(v); }, "LANG:TITLE");
    return check;
}

const CLI::Validator& date_check() {
    static const auto check = parse_check([](const std::string& v) { Date::parse_iso(v); }, "YYYY-MM-DD");
    return check;
}

const CLI::Validator& langs_check() {
    static const auto check = parse_check([](const std::string& v) { parse_language_list(v); }, "LANG,LANG");
    return check;
}

std::optional<Date> optional_date(const std::string& text) {
    return text.empty() ? std::nullopt : std::optional<Date>(Date::parse_iso(text));
}

std::optional<std::vector<LanguageCode>> optional_langs(const CLI::Option* option, const std::string& text) {
    return option->count() == 0 ? std::nullopt : std::optional(parse_language_list(text));
}

// The [start, end] window for commands that need both ends.
std::pair<Date, Date> window(const std::string& start, const std::string& end) {
    const auto [default_start, default_end] = default_window();
    const Date last = end.empty() ? default_end : Date::parse_iso(end);
    const Date first = start.empty() ? (end.empty() ? default_start : last - 29) : Date::parse_iso(start);
    return {first, last};
}

void add_global_options(CLI::App& app, GlobalOptions& g) {
    app.set_config("--config", "", "key=value file with defaults for the global options");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"tsv", "csv", "json"}));
    app.add_option("--fixtures", g.fixtures, "Fixture archive directory")->envname("WIKITOOLS_FIXTURES");
    app.add_option("--mode", g.mode, "Fixture mode (default: replay with --fixtures, else passthrough)")
        ->check(CLI::IsMember({"replay", "record", "passthrough"}))
        ->envname("WIKITOOLS_FIXTURE_MODE");
    app.add_option("--endpoint-wikipedia", g.endpoint_wikipedia, "Action API URL template with {language}");
    app.add_option("--endpoint-wikidata", g.endpoint_wikidata, "Wikidata action API URL");
    app.add_option("--endpoint-pageviews", g.endpoint_pageviews, "Pageviews REST API base URL");
    app.add_option("--user-agent", g.user_agent, "User-Agent header")->envname("WIKITOOLS_USER_AGENT");
    app.add_option("--rate-limit", g.rate_limit, "Requests per second")
        ->check(CLI::PositiveNumber)
        ->envname("WIKITOOLS_RATE_LIMIT");
    app.add_option("--max-concurrent", g.max_concurrent, "Concurrent requests per host")
        ->check(CLI::PositiveNumber)
        ->envname("WIKITOOLS_MAX_CONCURRENT");
    app.add_option("--max-pages", g.max_pages, "Continuation requests per query")->check(CLI::PositiveNumber);
    app.add_option("--access", g.access, "Pageviews access method")
        ->check(CLI::IsMember({"all-access", "desktop", "mobile-app", "mobile-web"}));
    app.add_option("--agent", g.agent, "Pageviews agent class")
        ->check(CLI::IsMember({"all-agents", "user", "spider", "automated"}));
    app.add_flag("--fail-fast", g.fail_fast, "Abort scenarios on the first failing article");
}

void add_title_command(CLI::App& app, Action& action, const std::string& name, const std::string& description,
                       ValueTable (Toolkit::*method)(std::string_view) const) {
    auto* command = app.add_subcommand(name, description);
    auto article = std::make_shared<std::string>();
    command->add_option("title", *article, "Qualified title")->required()->check(qualified_check());
    command->callback([&action, article, method] {
        action = [article, method](const Session& s) { return (s.toolkit.*method)(*article); };
    });
}

struct Commands {
    std::string article;
    std::string langs;
    std::string start;
    std::string end;
    std::string event;
    std::size_t top = 10;
    std::string predicate;
    std::string suffix;
    std::string headline = "{title}: {fact}";
    std::string description = "Visit {title} ({fact}).";
    std::string grid_file;
    bool concurrent = false;
};

void add_commands(CLI::App& app, Commands& c, Action& action) {
    for (const auto& name : {"translate", "expand"}) {
        const bool is_translate = std::string_view(name) == "translate";
        auto* command = app.add_subcommand(name, is_translate ? "Language links of an article"
                                                              : "Synonyms and translations with their synonyms");
        command->add_option("title", c.article, "Qualified title")->required()->check(qualified_check());
        auto* langs = command->add_option("--langs", c.langs, "Target languages, comma separated")
                          ->check(langs_check());
        command->callback([&c, &action, langs, is_translate] {
            auto targets = optional_langs(langs, c.langs);
            action = [&c, targets, is_translate](const Session& s) {
                return is_translate ? s.toolkit.wiki_translate(c.article, targets)
                                    : s.toolkit.wiki_expand(c.article, targets);
            };
        });
    }
    add_title_command(app, action, "synonyms", "Redirects to an article", &Toolkit::wiki_synonyms);
    add_title_command(app, action, "category-members", "Articles in a category", &Toolkit::wiki_category_members);
    add_title_command(app, action, "subcategories", "Subcategories of a category", &Toolkit::wiki_subcategories);
    add_title_command(app, action, "inbound", "Articles linking to an article", &Toolkit::wiki_inbound_links);
    add_title_command(app, action, "outbound", "Articles an article links to", &Toolkit::wiki_outbound_links);
    add_title_command(app, action, "mutual", "Links in both directions", &Toolkit::wiki_mutual_links);
    add_title_command(app, action, "geo", "Latitude and longitude", &Toolkit::wiki_geocoordinates);
    add_title_command(app, action, "facts", "Single-valued Wikidata facts", &Toolkit::wiki_data_facts);

    for (const auto& name : {"pageviews", "pageedits"}) {
        const bool views = std::string_view(name) == "pageviews";
        auto* command = app.add_subcommand(name, views ? "Daily pageviews" : "Daily edit counts");
        command->add_option("title", c.article, "Qualified title")->required()->check(qualified_check());
        command->add_option("--start", c.start, "First day")->check(date_check());
        command->add_option("--end", c.end, "Last day")->check(date_check());
        command->callback([&c, &action, views] {
            action = [&c, views](const Session& s) {
                return views ? s.toolkit.wiki_pageviews(c.article, optional_date(c.start), optional_date(c.end))
                             : s.toolkit.wiki_page_edits(c.article, optional_date(c.start), optional_date(c.end));
            };
        });
    }

    auto* grid = app.add_subcommand("grid", "Spreadsheet grids")->require_subcommand(1);
    auto* eval = grid->add_subcommand("eval", "Evaluate a TSV grid of literals and formulas");
    eval->add_option("file", c.grid_file, "TSV file")->required()->check(CLI::ExistingFile);
    eval->add_flag("--concurrent", c.concurrent, "Evaluate independent cells on worker threads");
    eval->callback([&c, &action] {
        action = [&c](const Session& s) {
            std::ifstream in(c.grid_file, std::ios::binary);
            std::stringstream text;
            text << in.rdbuf();
            if (!in) {
                throw ToolkitError(ErrorKind::bad_input, "cannot read " + c.grid_file);
            }
            EvalOptions options;
            options.concurrent = c.concurrent;
            const auto result = evaluate_grid(Grid::from_tsv(text.str()), wiki_builtins(s.toolkit), options);
            ValueTable table(std::max<std::size_t>(result.columns(), 1));
            for (auto& row : result.dense()) {
                table.add_row(std::move(row));
            }
            return table;
        };
    });

    auto* scenario = app.add_subcommand("scenario", "Multi-step recipes")->require_subcommand(1);
    auto* panel = scenario->add_subcommand("category-panel", "Category members ranked by pageviews");
    panel->add_option("category", c.article, "Qualified category title")->required()->check(qualified_check());
    panel->add_option("--start", c.start, "First day")->check(date_check());
    panel->add_option("--end", c.end, "Last day")->check(date_check());
    panel->add_option("--top", c.top, "Rows to keep")->check(CLI::PositiveNumber);
    panel->callback([&c, &action] {
        action = [&c](const Session& s) {
            const auto [first, last] = window(c.start, c.end);
            return scenario_category_panel(s.toolkit, c.article, first, last, c.top, s.scenario);
        };
    });

    auto* ads = scenario->add_subcommand("search-ads", "Ad copy from a fact and synonyms of each member");
    ads->add_option("category", c.article, "Qualified category title")->required()->check(qualified_check());
    ads->add_option("--predicate", c.predicate, "Fact predicate label, e.g. height")->required();
    ads->add_option("--suffix", c.suffix, "Term appended to every keyword");
    ads->add_option("--headline", c.headline, "Headline template")->capture_default_str();
    ads->add_option("--description", c.description, "Description template")->capture_default_str();
    ads->callback([&c, &action] {
        action = [&c](const Session& s) {
            return scenario_search_ads(s.toolkit, c.article, c.predicate, c.suffix, c.headline, c.description,
                                       s.scenario);
        };
    });

    auto* campaign = scenario->add_subcommand("campaign", "Mean daily views before and after an event, per language");
    campaign->add_option("title", c.article, "Qualified title")->required()->check(qualified_check());
    campaign->add_option("--start", c.start, "First day")->required()->check(date_check());
    campaign->add_option("--end", c.end, "Last day")->required()->check(date_check());
    campaign->add_option("--event", c.event, "First day after the event")->required()->check(date_check());
    campaign->callback([&c, &action] {
        action = [&c](const Session& s) {
            return scenario_campaign(s.toolkit, c.article, Date::parse_iso(c.start), Date::parse_iso(c.end),
                                     Date::parse_iso(c.event), s.scenario);
        };
    });
}

TransportConfig transport_config(const GlobalOptions& g) {
    TransportConfig config;
    if (!g.mode.empty()) {
        config.mode = *parse_fixture_mode(g.mode);
    } else if (!g.fixtures.empty()) {
        config.mode = FixtureMode::replay;
    }
    if (config.mode != FixtureMode::passthrough && g.fixtures.empty()) {
        throw CLI::ValidationError("--mode " + std::string(to_string(config.mode)) + " needs --fixtures");
    }
    config.archive_root = g.fixtures;
    if (!g.user_agent.empty()) {
        config.user_agent = g.user_agent;
    }
    config.rate_limit.max_requests_per_second = g.rate_limit;
    config.rate_limit.max_concurrent_per_host = g.max_concurrent;
    return config;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            std::shared_ptr<HttpFetcher> fetcher) {
    CLI::App app{"Wikipedia and Wikidata lookups as spreadsheet-style tables", "wikitools"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions globals;
    Commands commands;
    Action action;
    add_global_options(app, globals);
    add_commands(app, commands, action);

    TransportConfig config;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        config = transport_config(globals);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!fetcher) {
            fetcher = config.mode == FixtureMode::replay ? std::make_shared<DisabledFetcher>() : make_live_fetcher();
        }
        Transport transport(config, fetcher);

        MediaWikiConfig mediawiki_config;
        mediawiki_config.max_pages = globals.max_pages;
        if (!globals.endpoint_wikipedia.empty()) {
            mediawiki_config.endpoint_template = globals.endpoint_wikipedia;
        }
        WikidataConfig wikidata_config;
        if (!globals.endpoint_wikidata.empty()) {
            wikidata_config.endpoint = globals.endpoint_wikidata;
        }
        PageviewsConfig pageviews_config;
        pageviews_config.access = globals.access;
        pageviews_config.agent = globals.agent;
        if (!globals.endpoint_pageviews.empty()) {
            pageviews_config.endpoint = globals.endpoint_pageviews;
        }
        const MediaWikiClient mediawiki(transport, mediawiki_config);
        const WikidataClient wikidata(transport, wikidata_config);
        const PageviewsClient pageviews(transport, pageviews_config);
        const Toolkit toolkit(mediawiki, wikidata, pageviews);

        Session session{toolkit, ScenarioOptions{}};
        session.scenario.fail_fast = globals.fail_fast;
        const auto table = action(session);
        out << print_table(table, *parse_output_format(globals.format));
        return 0;
    } catch (const ToolkitError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace wikitools
