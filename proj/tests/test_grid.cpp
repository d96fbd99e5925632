#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fake_wikimedia.hpp"
#include "wikitools/formula.hpp"

using namespace wikitools;
using namespace wikitools::testing;

namespace {

CellRef at(std::string_view text) {
    return CellRef::parse(text);
}

std::size_t count_arg(const std::vector<std::string>& args, std::size_t index) {
    return static_cast<std::size_t>(std::stoul(args.at(index)));
}

// Scalar and table functions with no network behind them.
BuiltinRegistry test_functions() {
    BuiltinRegistry registry;
    registry.add("ID", [](const std::vector<std::string>& args) { return ValueTable::column({args.at(0)}); });
    registry.add("CAT", [](const std::vector<std::string>& args) {
        std::string out;
        for (const auto& arg : args) {
            out += arg;
        }
        return ValueTable::column({out});
    });
    registry.add("LIST", [](const std::vector<std::string>& args) {
        std::vector<std::string> values;
        for (std::size_t i = 1; i <= count_arg(args, 0); ++i) {
            values.push_back("v" + std::to_string(i));
        }
        return ValueTable::column(values);
    });
    registry.add("BLOCK", [](const std::vector<std::string>& args) {
        ValueTable table(count_arg(args, 1));
        for (std::size_t r = 0; r < count_arg(args, 0); ++r) {
            std::vector<std::string> row;
            for (std::size_t c = 0; c < table.columns(); ++c) {
                row.push_back(std::to_string(r) + "," + std::to_string(c));
            }
            table.add_row(row);
        }
        return table;
    });
    registry.add("NOTHING", [](const std::vector<std::string>&) { return ValueTable(1); });
    registry.add("FAIL", [](const std::vector<std::string>&) -> ValueTable {
        throw ToolkitError(ErrorKind::not_found, "nothing here");
    });
    return registry;
}

Grid grid_of(std::initializer_list<std::pair<std::string_view, std::string_view>> cells) {
    Grid grid;
    for (const auto& [cell, raw] : cells) {
        grid.set(at(cell), raw);
    }
    return grid;
}

// Independent oracle: a formula cell lies on a directed cycle iff it can
// reach itself through references to other formula cells.
std::set<CellRef> oracle_cycle_cells(const Grid& grid) {
    std::map<CellRef, std::vector<CellRef>> edges;
    for (const auto& [cell, content] : grid.cells()) {
        if (const auto* formula = std::get_if<Formula>(&content)) {
            for (const auto& target : referenced_cells(formula->expr)) {
                const auto it = grid.cells().find(target);
                if (it != grid.cells().end() && std::holds_alternative<Formula>(it->second)) {
                    edges[cell].push_back(target);
                }
            }
        }
    }
    std::set<CellRef> cyclic;
    for (const auto& [start, ignored] : edges) {
        std::set<CellRef> seen;
        std::vector<CellRef> stack(edges[start].begin(), edges[start].end());
        while (!stack.empty()) {
            const auto node = stack.back();
            stack.pop_back();
            if (node == start) {
                cyclic.insert(start);
                break;
            }
            if (!seen.insert(node).second) {
                continue;
            }
            for (const auto& next : edges[node]) {
                stack.push_back(next);
            }
        }
    }
    return cyclic;
}

Grid random_reference_grid(std::mt19937& rng, int size) {
    Grid grid;
    std::uniform_int_distribution<int> coordinate(1, size);
    for (int row = 1; row <= size; ++row) {
        for (int column = 1; column <= size; ++column) {
            const CellRef cell{static_cast<std::uint32_t>(column), static_cast<std::uint32_t>(row)};
            const int kind = static_cast<int>(rng() % 10);
            if (kind < 3) {
                continue;
            }
            if (kind < 5) {
                grid.set_literal(cell, "lit" + cell.to_string());
                continue;
            }
            std::string source = "=CAT(";
            const int refs = static_cast<int>(rng() % 3);
            for (int i = 0; i < refs; ++i) {
                const CellRef target{static_cast<std::uint32_t>(coordinate(rng)),
                                     static_cast<std::uint32_t>(coordinate(rng))};
                source += (i > 0 ? ", " : "") + target.to_string();
            }
            source += refs == 0 ? "\"k\")" : ")";
            grid.set_formula(cell, source);
        }
    }
    return grid;
}

bool regions_overlap(const SpillRegion& a, const SpillRegion& b) {
    return a.anchor.column < b.anchor.column + b.columns && b.anchor.column < a.anchor.column + a.columns &&
           a.anchor.row < b.anchor.row + b.rows && b.anchor.row < a.anchor.row + a.rows;
}

}  // namespace

TEST(Grid, GeocoordinatesSpillOneRowTwoColumns) {
    auto fake = std::make_shared<FakeWikimedia>();
    fake->coordinates["en:Berlin"] = {{52.52, 13.405}};
    ToolkitFixture f(fake);
    const auto result =
        evaluate_grid(grid_of({{"A1", "en:Berlin"}, {"B1", "=WIKIGEOCOORDINATES(A1)"}}), wiki_builtins(f.toolkit));
    EXPECT_EQ(result.value(at("B1")), "52.52");
    EXPECT_EQ(result.value(at("C1")), "13.405");
    EXPECT_EQ(result.cells().at(at("C1")).origin, EvaluatedCell::Origin::spill);
    EXPECT_EQ(result.cells().at(at("C1")).anchor, at("B1"));
}

TEST(Grid, SelfReferenceIsCycle) {
    const auto result = evaluate_grid(grid_of({{"A1", "=A1"}}), test_functions());
    EXPECT_EQ(result.value(at("A1")), error_token::cycle);
    EXPECT_TRUE(result.cells().at(at("A1")).is_error);
}

TEST(Grid, EveryCellOfACycleIsStampedAndReadersGetValueError) {
    const auto result = evaluate_grid(
        grid_of({{"A1", "=ID(B1)"}, {"B1", "=ID(C1)"}, {"C1", "=ID(A1)"}, {"D1", "=ID(A1)"}}), test_functions());
    EXPECT_EQ(result.value(at("A1")), error_token::cycle);
    EXPECT_EQ(result.value(at("B1")), error_token::cycle);
    EXPECT_EQ(result.value(at("C1")), error_token::cycle);
    EXPECT_EQ(result.value(at("D1")), error_token::value);
}

TEST(Grid, SynonymSpillCollidesOnlyWithCellsBelow) {
    auto fake = std::make_shared<FakeWikimedia>();
    fake->redirects["en:Berlin"] = {"Berlin, Germany", "City of Berlin"};
    ToolkitFixture f(fake);
    const auto builtins = wiki_builtins(f.toolkit);

    const auto clean =
        evaluate_grid(grid_of({{"A1", "en:Berlin"}, {"B1", "=WIKISYNONYMS(A1)"}, {"C1", "beside"}}), builtins);
    EXPECT_EQ(clean.value(at("B1")), "en:Berlin, Germany");
    EXPECT_EQ(clean.value(at("B2")), "en:City of Berlin");
    EXPECT_EQ(clean.value(at("C1")), "beside");

    const auto blocked =
        evaluate_grid(grid_of({{"A1", "en:Berlin"}, {"B1", "=WIKISYNONYMS(A1)"}, {"B2", "below"}}), builtins);
    EXPECT_EQ(blocked.value(at("B1")), error_token::spill);
    EXPECT_EQ(blocked.value(at("B2")), "below");
    EXPECT_TRUE(blocked.spills().empty());
}

TEST(Grid, SpillsDoNotOverlapEachOther) {
    const auto result = evaluate_grid(grid_of({{"B1", "=BLOCK(2, 2)"}, {"A2", "=BLOCK(1, 3)"}}), test_functions());
    EXPECT_EQ(result.value(at("B1")), "0,0");
    EXPECT_EQ(result.value(at("C2")), "1,1");
    EXPECT_EQ(result.value(at("A2")), error_token::spill);
    EXPECT_EQ(result.spills().size(), 1u);
}

TEST(Grid, UnknownFunctionIsName) {
    const auto result = evaluate_grid(grid_of({{"A1", "x"}, {"B1", "=NOSUCHFN(A1)"}}), test_functions());
    EXPECT_EQ(result.value(at("B1")), error_token::name);
}

TEST(Grid, FailingFunctionIsValueAndErrorsPropagate) {
    const auto result = evaluate_grid(
        grid_of({{"A1", "=FAIL()"}, {"A2", "=ID(A1)"}, {"A3", "=CAT(\"x\", NOSUCH())"}}), test_functions());
    EXPECT_EQ(result.value(at("A1")), error_token::value);
    EXPECT_EQ(result.value(at("A2")), error_token::value);
    EXPECT_EQ(result.value(at("A3")), error_token::name);
}

TEST(Grid, ReadingSpilledCellsUsesTheAnchor) {
    const auto result = evaluate_grid(
        grid_of({{"C1", "=CAT(\"got \", A3)"}, {"A1", "=LIST(3)"}, {"D1", "=ID(C1)"}}), test_functions());
    EXPECT_EQ(result.value(at("A3")), "v3");
    EXPECT_EQ(result.value(at("C1")), "got v3");
    EXPECT_EQ(result.value(at("D1")), "got v3");
}

TEST(Grid, CycleThroughASpill) {
    const auto result = evaluate_grid(grid_of({{"A1", "=LIST(3, B1)"}, {"B1", "=ID(A2)"}}), test_functions());
    EXPECT_EQ(result.value(at("A1")), error_token::cycle);
    EXPECT_EQ(result.value(at("B1")), error_token::cycle);
}

TEST(Grid, NestedTableContributesTopLeftAndBlankReadsAreEmpty) {
    const auto result = evaluate_grid(
        grid_of({{"A1", "=ID(LIST(3))"}, {"B1", "=CAT(\"[\", Z99, \"]\")"}, {"C1", "=ID(NOTHING())"}, {"D1", "=NOTHING()"}}),
        test_functions());
    EXPECT_EQ(result.value(at("A1")), "v1");
    EXPECT_EQ(result.value(at("A2")), "");
    EXPECT_EQ(result.value(at("B1")), "[]");
    EXPECT_EQ(result.value(at("C1")), "");
    EXPECT_EQ(result.value(at("D1")), "");
    EXPECT_FALSE(result.cells().at(at("D1")).is_error);
}

TEST(Grid, BlankArticleArgumentGivesEmptyCell) {
    auto fake = std::make_shared<FakeWikimedia>();
    ToolkitFixture f(fake);
    const auto result = evaluate_grid(grid_of({{"B1", "=WIKISYNONYMS(A1)"}}), wiki_builtins(f.toolkit));
    EXPECT_EQ(result.value(at("B1")), "");
    EXPECT_EQ(fake->calls(), 0);
}

TEST(Grid, MaxCellsIsEnforced) {
    EvalOptions options;
    options.max_cells = 20;
    try {
        evaluate_grid(grid_of({{"A1", "=LIST(50)"}}), test_functions(), options);
        FAIL();
    } catch (const ToolkitError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::bad_input);
    }
    EXPECT_NO_THROW(evaluate_grid(grid_of({{"A1", "=LIST(20)"}}), test_functions(), options));
    Grid big;
    for (std::uint32_t row = 1; row <= 21; ++row) {
        big.set_literal(CellRef{1, row}, "x");
    }
    EXPECT_THROW(evaluate_grid(big, test_functions(), options), ToolkitError);
}

TEST(Grid, CycleStampsMatchIndependentOracle) {
    std::mt19937 rng(500);
    int disagreements = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto grid = random_reference_grid(rng, 3 + trial % 5);
        const auto result = evaluate_grid(grid, test_functions());
        std::set<CellRef> stamped;
        for (const auto& [cell, value] : result.cells()) {
            if (value.text == error_token::cycle) {
                stamped.insert(cell);
            }
        }
        disagreements += stamped == oracle_cycle_cells(grid) ? 0 : 1;
    }
    EXPECT_EQ(disagreements, 0);
}

TEST(Grid, RandomSpillsNeverOverlapOrCoverInput) {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        Grid grid;
        for (int i = 0; i < 8; ++i) {
            const CellRef cell{1 + static_cast<std::uint32_t>(rng() % 6), 1 + static_cast<std::uint32_t>(rng() % 6)};
            if (rng() % 3 == 0) {
                grid.set_literal(cell, "x");
            } else {
                grid.set_formula(cell, "=BLOCK(" + std::to_string(1 + rng() % 3) + ", " +
                                           std::to_string(1 + rng() % 3) + ")");
            }
        }
        const auto result = evaluate_grid(grid, test_functions());
        const auto& spills = result.spills();
        for (std::size_t i = 0; i < spills.size(); ++i) {
            for (std::size_t j = i + 1; j < spills.size(); ++j) {
                ASSERT_FALSE(regions_overlap(spills[i], spills[j])) << "trial " << trial;
            }
        }
        for (const auto& [cell, value] : result.cells()) {
            if (value.origin == EvaluatedCell::Origin::spill) {
                ASSERT_FALSE(grid.cells().count(cell)) << "trial " << trial;
            }
        }
    }
}

TEST(Grid, EvaluationIsDeterministicAcrossRunsAndModes) {
    auto fake = std::make_shared<FakeWikimedia>();
    Grid grid;
    for (std::uint32_t row = 1; row <= 40; ++row) {
        const auto title = "Place " + std::to_string(row);
        fake->redirects["en:" + title] = {title + " (city)", title + " (town)"};
        fake->coordinates["en:" + title] = {{row * 1.5, row * -0.25}};
        grid.set_literal(CellRef{1, row * 3}, "en:" + title);
        grid.set_formula(CellRef{2, row * 3}, "=WIKISYNONYMS(A" + std::to_string(row * 3) + ")");
        grid.set_formula(CellRef{3, row * 3}, "=WIKIGEOCOORDINATES(A" + std::to_string(row * 3) + ")");
        grid.set_formula(CellRef{5, row * 3}, "=WIKISYNONYMS(B" + std::to_string(row * 3 + 1) + ")");
    }
    ToolkitFixture f(fake);
    const auto builtins = wiki_builtins(f.toolkit);
    const auto reference = print_grid(evaluate_grid(grid, builtins), OutputFormat::json);
    for (int run = 0; run < 5; ++run) {
        EXPECT_EQ(print_grid(evaluate_grid(grid, builtins), OutputFormat::json), reference);
        EXPECT_EQ(print_grid(evaluate_grid(grid, builtins, EvalOptions{100'000, true}), OutputFormat::json), reference);
    }

    Grid reversed;
    for (auto it = grid.cells().rbegin(); it != grid.cells().rend(); ++it) {
        if (const auto* text = std::get_if<std::string>(&it->second)) {
            reversed.set_literal(it->first, *text);
        } else {
            reversed.set_formula(it->first, std::get<Formula>(it->second).source);
        }
    }
    EXPECT_EQ(print_grid(evaluate_grid(reversed, builtins), OutputFormat::json), reference);
}

TEST(GridTsv, ParsesFormulasAndLiterals) {
    const auto grid = Grid::from_tsv("en:Berlin\t=ID(A1)\r\n\tx\n");
    ASSERT_EQ(grid.cells().size(), 3u);
    EXPECT_TRUE(std::holds_alternative<Formula>(grid.cells().at(at("B1"))));
    EXPECT_EQ(std::get<std::string>(grid.cells().at(at("B2"))), "x");
    EXPECT_FALSE(grid.cells().count(at("A2")));
}

TEST(GridTsv, SyntaxErrorNamesTheCell) {
    try {
        Grid::from_tsv("a\n\t=WIKI(\n");
        FAIL();
    } catch (const FormulaSyntaxError& e) {
        EXPECT_EQ(e.offset(), 5u);
        EXPECT_NE(std::string(e.what()).find("B2"), std::string::npos) << e.what();
    }
}

TEST(GridTsv, LiteralGridsRoundTrip) {
    const std::string text = "a\tb\tc\n\td\t\ne\t\tf\n";
    const auto result = evaluate_grid(Grid::from_tsv(text), test_functions());
    EXPECT_EQ(print_grid(result, OutputFormat::tsv), text);
}

TEST(PrintGrid, Formats) {
    EXPECT_EQ(print_grid(EvaluatedGrid{}, OutputFormat::tsv), "");
    const auto result = evaluate_grid(grid_of({{"A1", "x"}, {"B1", "Berlin, Germany"}, {"A2", "say \"hi\""}}),
                                      test_functions());
    EXPECT_EQ(print_grid(result, OutputFormat::csv), "x,\"Berlin, Germany\"\n\"say \"\"hi\"\"\",\n");
    EXPECT_EQ(print_grid(result, OutputFormat::tsv), "x\tBerlin, Germany\nsay \"hi\"\t\n");
    EXPECT_EQ(print_grid(result, OutputFormat::json), "[[\"x\",\"Berlin, Germany\"],[\"say \\\"hi\\\"\",\"\"]]\n");
    EXPECT_EQ(format_rows({{"a\tb", "c\nd"}}, OutputFormat::tsv), "a b\tc d\n");
    EXPECT_EQ(parse_output_format("csv"), OutputFormat::csv);
    EXPECT_FALSE(parse_output_format("xml").has_value());
}
