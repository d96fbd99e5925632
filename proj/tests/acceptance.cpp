// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "fake_wikimedia.hpp"
#include "wikitools/cli.hpp"
#include "wikitools/formula.hpp"
#include "wikitools/scenarios.hpp"

using namespace wikitools;
using namespace wikitools::testing;

namespace {

const Date jan1{2016, 1, 1};
const Date jan13{2016, 1, 13};
const Date jan31{2016, 1, 31};

// Every replay transport in this binary shares this fetcher, so one
// counter covers all of them.
std::shared_ptr<DisabledFetcher> network = std::make_shared<DisabledFetcher>();

ToolkitFixture replay_clients() {
    TransportConfig config;
    config.mode = FixtureMode::replay;
    config.archive_root = fixture_archive();
    return ToolkitFixture(config, network);
}

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool condition, const std::string& message) {
        if (!condition && ok) {
            ok = false;
            detail = message;
        }
    }
};

int failures = 0;

void criterion(int number, const std::string& name, const std::function<Check()>& body) {
    Check check;
    try {
        check = body();
    } catch (const std::exception& e) {
        check.ok = false;
        check.detail = std::string("exception: ") + e.what();
    }
    failures += check.ok ? 0 : 1;
    std::cout << (check.ok ? "PASS" : "FAIL") << " criterion " << number << ": " << name;
    if (!check.detail.empty()) {
        std::cout << " (" << check.detail << ")";
    }
    std::cout << std::endl;
}

std::set<std::string> as_set(const std::vector<std::string>& values) {
    return {values.begin(), values.end()};
}

// --- criterion 2 -----------------------------------------------------------

Claim random_claim(std::mt19937& rng) {
    switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
    case 0: return Claim{SnakType::somevalue, "", nullptr};
    case 1: return Claim{SnakType::novalue, "", nullptr};
    case 2: return Claim{SnakType::value, "string", "s" + std::to_string(rng() % 50)};
    case 3: return Claim{SnakType::value, "quantity", {{"amount", "+" + std::to_string(rng() % 900)}}};
    case 4:
        return Claim{SnakType::value, "wikibase-entityid", {{"entity-type", "item"}, {"id", "Q" + std::to_string(1 + rng() % 99)}}};
    default: return Claim{SnakType::value, "time", {{"time", "+1999-05-06T00:00:00Z"}, {"precision", 11}}};
    }
}

Check single_value_simplification() {
    Check check;
    std::mt19937 rng(1000);
    int agree = 0;
    constexpr int cases = 1000;
    for (int trial = 0; trial < cases; ++trial) {
        RawClaimSet raw;
        const int properties = std::uniform_int_distribution<int>(0, 10)(rng);
        for (int p = 0; p < properties; ++p) {
            std::vector<Claim> claims;
            for (int c = std::uniform_int_distribution<int>(1, 4)(rng); c > 0; --c) {
                claims.push_back(random_claim(rng));
            }
            raw[EntityId::parse("P" + std::to_string(1 + rng() % 30))] = std::move(claims);
        }
        std::set<std::string> expected;
        for (const auto& [property, claims] : raw) {
            const auto values = std::count_if(claims.begin(), claims.end(),
                                              [](const Claim& c) { return c.snak_type == SnakType::value; });
            if (values == 1) {
                expected.insert(property.str());
            }
        }
        std::set<std::string> actual;
        for (const auto& [property, value] : simplify_claims(raw)) {
            actual.insert(property.str());
        }
        agree += actual == expected ? 1 : 0;
    }
    check.expect(agree == cases, std::to_string(agree) + "/" + std::to_string(cases) + " agree");
    return check;
}

// --- criterion 3 -----------------------------------------------------------

Check mutual_links_oracle() {
    Check check;
    {
        auto fake = std::make_shared<FakeWikimedia>();
        fake->outbound["en:X"] = {"A", "B", "C"};
        fake->inbound["en:X"] = {"B", "C", "D"};
        ToolkitFixture f(fake);
        check.expect(f.toolkit.wiki_mutual_links("en:X").column_values(0) == std::vector<std::string>{"en:B", "en:C"},
                     "hand fixture");
    }
    std::mt19937 rng(200);
    int agree = 0;
    constexpr int cases = 200;
    for (int trial = 0; trial < cases; ++trial) {
        auto fake = std::make_shared<FakeWikimedia>();
        fake->page_size = 1 + rng() % 9;
        std::vector<std::string> outbound;
        std::vector<std::string> inbound;
        for (int i = 0, n = 1 + static_cast<int>(rng() % 60); i < n; ++i) {
            const auto title = "T" + std::to_string(i);
            if (rng() % 3 != 0) outbound.push_back(title);
            if (rng() % 2 != 0) inbound.push_back(title);
        }
        std::shuffle(outbound.begin(), outbound.end(), rng);
        std::shuffle(inbound.begin(), inbound.end(), rng);
        fake->outbound["en:Hub"] = outbound;
        fake->inbound["en:Hub"] = inbound;
        const std::set<std::string> in_set(inbound.begin(), inbound.end());
        std::vector<std::string> expected;
        for (const auto& title : outbound) {
            if (in_set.count(title)) {
                expected.push_back("en:" + title);
            }
        }
        ToolkitFixture f(fake);
        agree += f.toolkit.wiki_mutual_links("en:Hub").column_values(0) == expected ? 1 : 0;
    }
    check.expect(agree == cases, std::to_string(agree) + "/" + std::to_string(cases) + " agree");
    return check;
}

// --- criterion 4 -----------------------------------------------------------

// Every article whose language links were recorded, read from the envelopes.
std::vector<std::string> recorded_langlink_articles() {
    std::set<std::string> articles;
    for (const auto& entry : std::filesystem::directory_iterator(fixture_archive())) {
        std::ifstream in(entry.path());
        const auto envelope = nlohmann::json::parse(in);
        const std::string url = envelope["url"];
        const auto host_start = url.find("://") + 3;
        const auto host = url.substr(host_start, url.find('/', host_start) - host_start);
        if (host.find(".wikipedia.org") == std::string::npos || url.find("prop=langlinks") == std::string::npos) {
            continue;
        }
        const auto titles_at = url.find("&titles=");
        const auto value_start = titles_at + 8;
        const auto value = url.substr(value_start, url.find('&', value_start) - value_start);
        articles.insert(host.substr(0, host.find('.')) + ":" + to_human_title(percent_decode(value)));
    }
    return {articles.begin(), articles.end()};
}

Check expansion_superset() {
    Check check;
    auto f = replay_clients();
    const auto articles = recorded_langlink_articles();
    int violations = 0;
    int checked = 0;
    for (const auto& article : articles) {
        std::vector<std::string> expanded;
        try {
            expanded = f.toolkit.wiki_expand(article).column_values(0);
        } catch (const ToolkitError&) {
            // Articles recorded only for a single lookup have no synonym fixtures.
            continue;
        }
        ++checked;
        const auto expanded_set = as_set(expanded);
        for (const auto& table : {f.toolkit.wiki_translate(article), f.toolkit.wiki_synonyms(article)}) {
            for (const auto& title : table.column_values(0)) {
                violations += expanded_set.count(title) ? 0 : 1;
            }
        }
    }
    check.expect(checked >= 2, "only " + std::to_string(checked) + " articles expandable");
    check.expect(violations == 0, std::to_string(violations) + " violations");
    check.detail = check.ok ? std::to_string(checked) + " articles" : check.detail;
    return check;
}

// --- criterion 5 -----------------------------------------------------------

Check continuation() {
    Check check;
    auto fake = std::make_shared<FakeWikimedia>();
    fake->page_size = 10;
    for (int i = 0; i < 23; ++i) {
        fake->redirects["en:Target"].push_back("Alias " + std::to_string(i));
    }
    ToolkitFixture f(fake);
    const auto titles = f.mediawiki.backlinks(parse_qualified("en:Target"), true);
    check.expect(titles.size() == 23, std::to_string(titles.size()) + " titles");
    check.expect(fake->calls() == 3, std::to_string(fake->calls()) + " fetches");
    return check;
}

// --- criterion 6 -----------------------------------------------------------

Check campaign_shape() {
    Check check;
    auto f = replay_clients();
    const auto source = parse_qualified("en:Miniatur Wunderland");
    const auto rows = campaign_rows(f.toolkit, source.to_string(), jan1, jan31, jan13);
    check.expect(!rows.empty() && rows[0].language == "en", "first row is not the source language");
    const auto& row = rows.at(0);
    check.expect(row.pre_mean() && row.post_mean(), "source row has no data");
    if (!check.ok) {
        return check;
    }
    check.expect(*row.post_mean() > *row.pre_mean(),
                 "post " + format_decimal(*row.post_mean()) + " <= pre " + format_decimal(*row.pre_mean()));
    const auto series = f.pageviews.daily_views(source, jan1, jan31);
    std::uint64_t sum = 0;
    for (const auto& point : series.points()) {
        sum += point.count;
    }
    const auto total = f.pageviews.total_views(source, jan1, jan31);
    check.expect(total == sum, "total " + std::to_string(total) + " != series sum " + std::to_string(sum));
    check.expect(*row.pre_total + *row.post_total == total, "window totals do not add up");
    if (check.ok) {
        check.detail = "pre " + format_decimal(*row.pre_mean()) + ", post " + format_decimal(*row.post_mean());
    }
    return check;
}

// --- criterion 7 -----------------------------------------------------------

Check category_panel() {
    Check check;
    auto f = replay_clients();
    const std::string category = "en:Category:Visitor attractions in Montreal";
    const auto table = scenario_category_panel(f.toolkit, category, jan1, jan31, 10);
    check.expect(table.rows() == 10, std::to_string(table.rows()) + " rows");
    const auto members = as_set(f.toolkit.wiki_category_members(category).column_values(0));
    for (std::size_t i = 0; i < table.rows(); ++i) {
        check.expect(members.count(table.at(i, 1)) == 1, table.at(i, 1) + " is not a member");
        check.expect(!table.at(i, 2).empty(), "row " + std::to_string(i + 1) + " has no views");
        if (i > 0 && !table.at(i, 2).empty() && !table.at(i - 1, 2).empty()) {
            check.expect(std::stoull(table.at(i, 2)) <= std::stoull(table.at(i - 1, 2)), "views increase at row " +
                                                                                               std::to_string(i + 1));
        }
    }
    const std::vector<std::pair<std::string, std::string>> snapshot{
        {"en:Mount Royal", "43099"},
        {"en:Old Montreal", "37577"},
        {"en:Notre-Dame Basilica (Montreal)", "36899"},
        {"en:Saint Joseph's Oratory", "25928"},
        {"en:Olympic Stadium (Montreal)", "25593"},
        {"en:Underground City, Montreal", "21608"},
        {"en:Biodôme de Montréal", "16051"},
        {"en:Montreal Botanical Garden", "16051"},
        {"en:Old Port of Montreal", "13823"},
        {"en:Jean-Talon Market", "11961"},
    };
    for (std::size_t i = 0; i < std::min(snapshot.size(), table.rows()); ++i) {
        check.expect(table.at(i, 1) == snapshot[i].first && table.at(i, 2) == snapshot[i].second,
                     "rank " + std::to_string(i + 1) + " is " + table.at(i, 1) + " " + table.at(i, 2));
    }
    return check;
}

// --- criterion 8 -----------------------------------------------------------

FormulaExpr random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> kind(0, depth >= 4 ? 2 : 4);
    switch (kind(rng)) {
    case 0: {
        static constexpr std::string_view alphabet = "ab \"',()=:\t-9\xc3\xa9";
        std::string text;
        for (int i = static_cast<int>(rng() % 10); i > 0; --i) {
            text += alphabet[rng() % alphabet.size()];
        }
        return FormulaExpr{StringLiteral{text}};
    }
    case 1: {
        if (rng() % 2) {
            return FormulaExpr{NumberLiteral{static_cast<double>(static_cast<int>(rng() % 20001) - 10000) / 8}};
        }
        double value;
        do {
            const std::uint64_t bits = (std::uint64_t{rng()} << 32) | rng();
            std::memcpy(&value, &bits, sizeof value);
        } while (!std::isfinite(value));
        return FormulaExpr{NumberLiteral{value}};
    }
    case 2:
        return FormulaExpr{CellReference{CellRef{1 + static_cast<std::uint32_t>(rng() % 16384),
                                                 1 + static_cast<std::uint32_t>(rng() % 1'000'000)}}};
    default: {
        std::string name(1, static_cast<char>('A' + rng() % 26));
        for (int i = static_cast<int>(rng() % 8); i > 0; --i) {
            name += "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"[rng() % 36];
        }
        Call call{name, {}};
        for (int i = static_cast<int>(rng() % 4); i > 0; --i) {
            call.args.push_back(random_expr(rng, depth + 1));
        }
        return FormulaExpr{std::move(call)};
    }
    }
}

BuiltinRegistry probe_functions() {
    BuiltinRegistry registry;
    registry.add("CAT", [](const std::vector<std::string>& args) {
        std::string out;
        for (const auto& arg : args) out += arg;
        return ValueTable::column({out});
    });
    registry.add("LIST", [](const std::vector<std::string>& args) {
        std::vector<std::string> values;
        for (int i = 1, n = std::stoi(args.at(0)); i <= n; ++i) values.push_back("v" + std::to_string(i));
        return ValueTable::column(values);
    });
    return registry;
}

// Independent cycle oracle: Floyd-Warshall reachability over formula cells.
std::set<CellRef> oracle_cycles(const Grid& grid) {
    std::vector<CellRef> nodes;
    for (const auto& [cell, content] : grid.cells()) {
        if (std::holds_alternative<Formula>(content)) nodes.push_back(cell);
    }
    const auto n = nodes.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& target : referenced_cells(std::get<Formula>(grid.cells().at(nodes[i])).expr)) {
            const auto it = std::find(nodes.begin(), nodes.end(), target);
            if (it != nodes.end()) reach[i][static_cast<std::size_t>(it - nodes.begin())] = true;
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    std::set<CellRef> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (reach[i][i]) out.insert(nodes[i]);
    }
    return out;
}

Check formula_engine() {
    Check check;
    std::mt19937 rng(8);

    int round_trip_failures = 0;
    constexpr int expressions = 10000;
    for (int i = 0; i < expressions; ++i) {
        const auto expr = random_expr(rng, 0);
        try {
            round_trip_failures += parse_formula(print_formula(expr)) == expr ? 0 : 1;
        } catch (const ToolkitError&) {
            ++round_trip_failures;
        }
    }
    check.expect(round_trip_failures == 0, "(a) " + std::to_string(round_trip_failures) + " round-trip failures");

    const auto functions = probe_functions();
    int cycle_disagreements = 0;
    constexpr int grids = 500;
    for (int g = 0; g < grids; ++g) {
        Grid grid;
        const std::uint32_t size = 3 + g % 4;
        for (std::uint32_t row = 1; row <= size; ++row) {
            for (std::uint32_t column = 1; column <= size; ++column) {
                const auto roll = rng() % 10;
                if (roll < 3) continue;
                if (roll < 5) {
                    grid.set_literal(CellRef{column, row}, "x");
                    continue;
                }
                std::string source = "=CAT(\"\"";
                for (auto refs = rng() % 3; refs > 0; --refs) {
                    source += ", " + CellRef{1 + static_cast<std::uint32_t>(rng() % size),
                                             1 + static_cast<std::uint32_t>(rng() % size)}
                                         .to_string();
                }
                grid.set_formula(CellRef{column, row}, source + ")");
            }
        }
        std::set<CellRef> stamped;
        const auto evaluated = evaluate_grid(grid, functions);
        for (const auto& [cell, value] : evaluated.cells()) {
            if (value.text == error_token::cycle) stamped.insert(cell);
        }
        cycle_disagreements += stamped == oracle_cycles(grid) ? 0 : 1;
    }
    check.expect(cycle_disagreements == 0, "(b) " + std::to_string(cycle_disagreements) + " cycle disagreements");

    Grid collision;
    collision.set(CellRef{1, 1}, "=LIST(3)");
    collision.set(CellRef{1, 3}, "occupied");
    const auto blocked = evaluate_grid(collision, functions);
    check.expect(blocked.value(CellRef{1, 1}) == error_token::spill, "(c) collision did not yield #SPILL");
    collision.set(CellRef{1, 3}, "");
    collision.set(CellRef{2, 3}, "beside");
    const auto clean = evaluate_grid(collision, functions);
    check.expect(clean.value(CellRef{1, 3}) == "v3" && clean.value(CellRef{2, 3}) == "beside",
                 "(c) collision-free variant did not spill");
    for (const auto& [cell, value] : clean.cells()) {
        check.expect(!value.is_error, "(c) error in collision-free grid at " + cell.to_string());
    }

    auto f = replay_clients();
    std::ifstream in(fixture_file("grids/berlin.tsv"));
    std::stringstream text;
    text << in.rdbuf();
    const auto grid = Grid::from_tsv(text.str());
    const auto builtins = wiki_builtins(f.toolkit);
    const auto reference = print_grid(evaluate_grid(grid, builtins), OutputFormat::tsv);
    bool deterministic = !reference.empty();
    for (int run = 0; run < 5; ++run) {
        deterministic &= print_grid(evaluate_grid(grid, builtins), OutputFormat::tsv) == reference;
        deterministic &= print_grid(evaluate_grid(grid, builtins, EvalOptions{100'000, true}), OutputFormat::tsv) ==
                         reference;
    }
    check.expect(deterministic, "(d) grid output differs between runs or modes");
    check.expect(reference.find('#') == std::string::npos, "(d) sample grid has error cells");
    return check;
}

// --- criterion 10 ----------------------------------------------------------

Check cli_determinism() {
    Check check;
    const auto archive = fixture_archive();
    const std::vector<std::string> dates{"--start", "2016-01-01", "--end", "2016-01-31"};
    std::vector<std::vector<std::string>> commands{
        {"translate", "en:Berlin"},
        {"expand", "en:Berlin"},
        {"synonyms", "en:Berlin"},
        {"category-members", "en:Category:Visitor attractions in Montreal"},
        {"subcategories", "en:Category:Berlin"},
        {"inbound", "en:Berlin"},
        {"outbound", "en:Berlin"},
        {"mutual", "en:Berlin"},
        {"geo", "en:Berlin"},
        {"facts", "en:Berlin"},
        {"pageviews", "en:Berlin", dates[0], dates[1], dates[2], dates[3]},
        {"pageedits", "en:Berlin", dates[0], dates[1], dates[2], dates[3]},
        {"grid", "eval", fixture_file("grids/berlin.tsv")},
        {"scenario", "category-panel", "en:Category:Visitor attractions in Montreal", dates[0], dates[1], dates[2],
         dates[3]},
        {"scenario", "search-ads", "en:Category:Skyscrapers over 350 meters", "--predicate", "height", "--suffix",
         "hotel"},
        {"scenario", "campaign", "en:Miniatur Wunderland", "--start", "2016-01-01", "--end", "2016-01-31", "--event",
         "2016-01-13"},
    };
    for (auto& args : commands) {
        args.insert(args.end(), {"--fixtures", archive, "--mode", "replay"});
        std::string outputs[2];
        for (auto& output : outputs) {
            std::ostringstream out;
            std::ostringstream err;
            const int code = run_cli(args, out, err, network);
            check.expect(code == 0, args[0] + " " + args[1] + " exited " + std::to_string(code) + ": " + err.str());
            output = out.str();
        }
        check.expect(!outputs[0].empty(), args[0] + " " + args[1] + " printed nothing");
        check.expect(outputs[0] == outputs[1], args[0] + " " + args[1] + " output differs between runs");
    }
    if (check.ok) {
        check.detail = std::to_string(commands.size()) + " commands";
    }
    return check;
}

}  // namespace

int main() {
    criterion(1, "facts en:Berlin has (ISO 3166-2 code, DE-BE) and no head of government", [] {
        Check check;
        auto f = replay_clients();
        const auto facts = f.toolkit.wiki_data_facts("en:Berlin");
        bool has_iso = false;
        for (const auto& row : facts.data()) {
            has_iso |= row[0] == "ISO 3166-2 code" && row[1] == "DE-BE";
            check.expect(row[0] != "head of government", "head of government row present");
        }
        check.expect(has_iso, "ISO 3166-2 code row missing");
        return check;
    });
    criterion(2, "single-value simplification matches brute force on 1000 claim sets", single_value_simplification);
    criterion(3, "mutual links match set intersection on 200 graphs and the hand fixture", mutual_links_oracle);
    criterion(4, "expand contains translate and synonyms on every recorded article", expansion_superset);
    criterion(5, "10+10+3 backlink continuation gives 23 titles in 3 fetches", continuation);
    criterion(6, "Miniatur Wunderland: post-event mean exceeds pre-event mean, totals exact", campaign_shape);
    criterion(7, "Montreal panel: 10 members, views non-increasing, ranking snapshot", category_panel);
    criterion(8, "formula round-trip, cycle oracle, spill collision, determinism", formula_engine);
    criterion(10, "every CLI subcommand is byte-identical across two replay runs", cli_determinism);
    criterion(9, "no live fetch attempted by any replay run above", [] {
        Check check;
        check.expect(network->attempts() == 0, std::to_string(network->attempts()) + " live fetch attempts");
        check.expect(failures == 0, "replay-backed criteria failed");
        return check;
    });
    return failures;
}
