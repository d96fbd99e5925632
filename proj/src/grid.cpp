#include <algorithm>
#include <future>
#include <set>
#include <thread>

#include "json.hpp"
#include "wikitools/formula.hpp"

namespace wikitools {

void Grid::set(CellRef cell, std::string_view raw) {
    if (raw.empty()) {
        cells_.erase(cell);
    } else if (raw.front() == '=') {
        set_formula(cell, raw);
    } else {
        set_literal(cell, std::string(raw));
    }
}

void Grid::set_literal(CellRef cell, std::string text) {
    if (text.empty()) {
        cells_.erase(cell);
        return;
    }
    cells_[cell] = std::move(text);
}

void Grid::set_formula(CellRef cell, std::string_view source) {
    try {
        cells_[cell] = Formula{std::string(source), parse_formula(source)};
    } catch (const FormulaSyntaxError& e) {
        throw FormulaSyntaxError(e.offset(), cell.to_string() + ": " + e.reason());
    }
}

Grid Grid::from_tsv(std::string_view text) {
    Grid grid;
    std::uint32_t row = 1;
    std::size_t line_start = 0;
    while (line_start < text.size()) {
        auto line_end = text.find('\n', line_start);
        if (line_end == std::string_view::npos) {
            line_end = text.size();
        }
        auto line = text.substr(line_start, line_end - line_start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        std::uint32_t column = 1;
        std::size_t field_start = 0;
        while (field_start <= line.size()) {
            auto field_end = line.find('\t', field_start);
            if (field_end == std::string_view::npos) {
                field_end = line.size();
            }
            grid.set(CellRef{column, row}, line.substr(field_start, field_end - field_start));
            ++column;
            field_start = field_end + 1;
        }
        ++row;
        line_start = line_end + 1;
    }
    return grid;
}

EvaluatedGrid::EvaluatedGrid(std::map<CellRef, EvaluatedCell> cells, std::vector<SpillRegion> spills)
    : cells_(std::move(cells)), spills_(std::move(spills)) {}

std::string EvaluatedGrid::value(CellRef cell) const {
    const auto it = cells_.find(cell);
    return it == cells_.end() ? std::string{} : it->second.text;
}

std::uint32_t EvaluatedGrid::rows() const noexcept {
    std::uint32_t rows = 0;
    for (const auto& [cell, content] : cells_) {
        if (!content.text.empty()) {
            rows = std::max(rows, cell.row);
        }
    }
    return rows;
}

std::uint32_t EvaluatedGrid::columns() const noexcept {
    std::uint32_t columns = 0;
    for (const auto& [cell, content] : cells_) {
        if (!content.text.empty()) {
            columns = std::max(columns, cell.column);
        }
    }
    return columns;
}

std::vector<std::vector<std::string>> EvaluatedGrid::dense() const {
    const auto n_rows = rows();
    const auto n_columns = columns();
    std::vector<std::vector<std::string>> out(n_rows, std::vector<std::string>(n_columns));
    for (const auto& [cell, content] : cells_) {
        if (cell.row <= n_rows && cell.column <= n_columns) {
            out[cell.row - 1][cell.column - 1] = content.text;
        }
    }
    return out;
}

void BuiltinRegistry::add(std::string name, Builtin function) {
    functions_[std::move(name)] = std::move(function);
}

const Builtin* BuiltinRegistry::find(std::string_view name) const {
    const auto it = functions_.find(name);
    return it == functions_.end() ? nullptr : &it->second;
}

std::vector<std::string> BuiltinRegistry::names() const {
    std::vector<std::string> names;
    for (const auto& [name, function] : functions_) {
        names.push_back(name);
    }
    return names;
}

namespace {

struct Outcome {
    std::optional<std::string_view> error;
    ValueTable table{1};
};

Outcome error_outcome(std::string_view token) {
    return Outcome{token, ValueTable(1)};
}

Outcome scalar_outcome(std::string text) {
    return Outcome{std::nullopt, ValueTable::column({std::move(text)})};
}

using Graph = std::map<CellRef, std::vector<CellRef>>;

// Cells on a directed cycle: members of a strongly connected component with
// more than one node, or nodes with a self-edge. Iterative Tarjan.
std::set<CellRef> cyclic_cells(const Graph& graph) {
    std::map<CellRef, int> index;
    std::map<CellRef, int> lowlink;
    std::set<CellRef> on_stack;
    std::vector<CellRef> stack;
    std::set<CellRef> cyclic;
    int next_index = 0;

    struct Frame {
        CellRef node;
        std::size_t edge = 0;
    };

    for (const auto& [root, ignored] : graph) {
        if (index.count(root)) {
            continue;
        }
        std::vector<Frame> call_stack{{root}};
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack.insert(root);
        while (!call_stack.empty()) {
            auto& frame = call_stack.back();
            const auto& edges = graph.at(frame.node);
            if (frame.edge < edges.size()) {
                const auto next = edges[frame.edge++];
                if (!graph.count(next)) {
                    continue;
                }
                if (!index.count(next)) {
                    index[next] = lowlink[next] = next_index++;
                    stack.push_back(next);
                    on_stack.insert(next);
                    call_stack.push_back({next});
                } else if (on_stack.count(next)) {
                    lowlink[frame.node] = std::min(lowlink[frame.node], index[next]);
                }
                continue;
            }
            const auto node = frame.node;
            call_stack.pop_back();
            if (!call_stack.empty()) {
                auto& parent = call_stack.back().node;
                lowlink[parent] = std::min(lowlink[parent], lowlink[node]);
            }
            if (lowlink[node] == index[node]) {
                std::vector<CellRef> component;
                CellRef member;
                do {
                    member = stack.back();
                    stack.pop_back();
                    on_stack.erase(member);
                    component.push_back(member);
                } while (!(member == node));
                const auto& own = graph.at(node);
                const bool self_loop = std::find(own.begin(), own.end(), node) != own.end();
                if (component.size() > 1 || self_loop) {
                    cyclic.insert(component.begin(), component.end());
                }
            }
        }
    }
    return cyclic;
}

class Evaluator {
  public:
    Evaluator(const Grid& grid, const BuiltinRegistry& functions, const EvalOptions& options)
        : grid_(grid), functions_(functions), options_(options) {
        for (const auto& [cell, content] : grid_.cells()) {
            if (std::holds_alternative<Formula>(content)) {
                formulas_.push_back(cell);
            }
        }
        if (grid_.cells().size() > options_.max_cells) {
            throw ToolkitError(ErrorKind::bad_input, "grid exceeds " + std::to_string(options_.max_cells) + " cells");
        }
    }

    EvaluatedGrid run() {
        // Spill extents are only known after evaluation, so evaluation is
        // repeated with every spill seen so far turned into a dependency
        // edge until no new edge appears. Edges only accumulate, so this
        // terminates.
        constexpr int max_rounds = 32;
        EvaluatedGrid result;
        for (int round = 0; round < max_rounds; ++round) {
            result = evaluate_round();
            bool grew = false;
            for (const auto& spill : result.spills()) {
                for (std::uint32_t r = 0; r < spill.rows; ++r) {
                    for (std::uint32_t c = 0; c < spill.columns; ++c) {
                        if (r == 0 && c == 0) {
                            continue;
                        }
                        const CellRef covered{spill.anchor.column + c, spill.anchor.row + r};
                        grew |= known_cover_[covered].insert(spill.anchor).second;
                    }
                }
            }
            if (!grew) {
                break;
            }
        }
        return result;
    }

  private:
    Graph dependency_graph() const {
        Graph graph;
        for (const auto& cell : formulas_) {
            std::vector<CellRef> deps;
            const auto& formula = std::get<Formula>(grid_.cells().at(cell));
            for (const auto& ref : referenced_cells(formula.expr)) {
                if (const auto it = grid_.cells().find(ref); it != grid_.cells().end()) {
                    if (std::holds_alternative<Formula>(it->second)) {
                        deps.push_back(ref);
                    }
                } else if (const auto cover = known_cover_.find(ref); cover != known_cover_.end()) {
                    deps.insert(deps.end(), cover->second.begin(), cover->second.end());
                }
            }
            std::sort(deps.begin(), deps.end());
            deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
            graph.emplace(cell, std::move(deps));
        }
        return graph;
    }

    // Longest-path depth over the acyclic part; edges into cyclic cells are
    // ignored because those cells are settled before evaluation starts.
    std::vector<std::vector<CellRef>> levels(const Graph& graph, const std::set<CellRef>& cyclic) const {
        std::map<CellRef, int> pending;
        std::map<CellRef, std::vector<CellRef>> dependents;
        for (const auto& [cell, deps] : graph) {
            if (cyclic.count(cell)) {
                continue;
            }
            int count = 0;
            for (const auto& dep : deps) {
                if (!cyclic.count(dep)) {
                    dependents[dep].push_back(cell);
                    ++count;
                }
            }
            pending[cell] = count;
        }
        std::vector<std::vector<CellRef>> out;
        std::vector<CellRef> frontier;
        for (const auto& [cell, count] : pending) {
            if (count == 0) {
                frontier.push_back(cell);
            }
        }
        while (!frontier.empty()) {
            std::sort(frontier.begin(), frontier.end());
            std::vector<CellRef> next;
            for (const auto& cell : frontier) {
                for (const auto& dependent : dependents[cell]) {
                    if (--pending[dependent] == 0) {
                        next.push_back(dependent);
                    }
                }
            }
            out.push_back(std::move(frontier));
            frontier = std::move(next);
        }
        return out;
    }

    Outcome evaluate(const FormulaExpr& expr, const std::map<CellRef, EvaluatedCell>& values) const {
        if (const auto* literal = std::get_if<StringLiteral>(&expr.node)) {
            return scalar_outcome(literal->text);
        }
        if (const auto* number = std::get_if<NumberLiteral>(&expr.node)) {
            return scalar_outcome(format_decimal(number->value));
        }
        if (const auto* reference = std::get_if<CellReference>(&expr.node)) {
            const auto it = values.find(reference->ref);
            if (it == values.end()) {
                return scalar_outcome({});
            }
            if (it->second.is_error) {
                return error_outcome(error_token::value);
            }
            return scalar_outcome(it->second.text);
        }
        const auto& call = std::get<Call>(expr.node);
        const auto* function = functions_.find(call.name);
        if (function == nullptr) {
            return error_outcome(error_token::name);
        }
        std::vector<std::string> args;
        args.reserve(call.args.size());
        for (const auto& arg : call.args) {
            auto outcome = evaluate(arg, values);
            if (outcome.error) {
                return outcome;
            }
            // A nested table contributes its top-left value.
            args.push_back(outcome.table.empty() ? std::string{} : outcome.table.at(0, 0));
        }
        try {
            return Outcome{std::nullopt, (*function)(args)};
        } catch (const std::exception&) {
            return error_outcome(error_token::value);
        }
    }

    EvaluatedGrid evaluate_round() const {
        std::map<CellRef, EvaluatedCell> values;
        for (const auto& [cell, content] : grid_.cells()) {
            if (const auto* text = std::get_if<std::string>(&content)) {
                values[cell] = EvaluatedCell{*text, EvaluatedCell::Origin::literal, false, std::nullopt};
            }
        }
        const auto graph = dependency_graph();
        const auto cyclic = cyclic_cells(graph);
        for (const auto& cell : cyclic) {
            values[cell] = EvaluatedCell{std::string(error_token::cycle), EvaluatedCell::Origin::formula, true,
                                         std::nullopt};
        }
        std::vector<SpillRegion> spills;
        std::size_t occupied = grid_.cells().size();
        for (const auto& level : levels(graph, cyclic)) {
            const auto outcomes = evaluate_level(level, values);
            for (std::size_t i = 0; i < level.size(); ++i) {
                commit(level[i], outcomes[i], values, spills, occupied);
            }
        }
        return EvaluatedGrid(std::move(values), std::move(spills));
    }

    std::vector<Outcome> evaluate_level(const std::vector<CellRef>& level,
                                        const std::map<CellRef, EvaluatedCell>& values) const {
        std::vector<Outcome> outcomes(level.size());
        const auto run_range = [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                outcomes[i] = evaluate(std::get<Formula>(grid_.cells().at(level[i])).expr, values);
            }
        };
        if (!options_.concurrent || level.size() < 2) {
            run_range(0, level.size());
            return outcomes;
        }
        const std::size_t workers =
            std::min<std::size_t>(level.size(), std::max(2u, std::thread::hardware_concurrency()) * 2);
        const std::size_t chunk = (level.size() + workers - 1) / workers;
        std::vector<std::future<void>> tasks;
        for (std::size_t begin = 0; begin < level.size(); begin += chunk) {
            tasks.push_back(std::async(std::launch::async, run_range, begin, std::min(level.size(), begin + chunk)));
        }
        for (auto& task : tasks) {
            task.get();
        }
        return outcomes;
    }

    void commit(CellRef anchor, const Outcome& outcome, std::map<CellRef, EvaluatedCell>& values,
                std::vector<SpillRegion>& spills, std::size_t& occupied) const {
        const auto set_anchor = [&](std::string text, bool is_error) {
            values[anchor] = EvaluatedCell{std::move(text), EvaluatedCell::Origin::formula, is_error, std::nullopt};
        };
        if (outcome.error) {
            set_anchor(std::string(*outcome.error), true);
            return;
        }
        const auto& table = outcome.table;
        if (table.empty()) {
            set_anchor({}, false);
            return;
        }
        const auto n_rows = static_cast<std::uint32_t>(table.rows());
        const auto n_columns = static_cast<std::uint32_t>(table.columns());
        if (occupied + static_cast<std::size_t>(n_rows) * n_columns - 1 > options_.max_cells) {
            throw ToolkitError(ErrorKind::bad_input, "evaluated grid exceeds " + std::to_string(options_.max_cells) +
                                                         " cells (spill from " + anchor.to_string() + ")");
        }
        for (std::uint32_t r = 0; r < n_rows; ++r) {
            for (std::uint32_t c = 0; c < n_columns; ++c) {
                if (r == 0 && c == 0) {
                    continue;
                }
                const CellRef target{anchor.column + c, anchor.row + r};
                if (grid_.cells().count(target) || values.count(target)) {
                    set_anchor(std::string(error_token::spill), true);
                    return;
                }
            }
        }
        set_anchor(table.at(0, 0), false);
        for (std::uint32_t r = 0; r < n_rows; ++r) {
            for (std::uint32_t c = 0; c < n_columns; ++c) {
                if (r == 0 && c == 0) {
                    continue;
                }
                values[CellRef{anchor.column + c, anchor.row + r}] =
                    EvaluatedCell{table.at(r, c), EvaluatedCell::Origin::spill, false, anchor};
            }
        }
        occupied += static_cast<std::size_t>(n_rows) * n_columns - 1;
        spills.push_back(SpillRegion{anchor, n_rows, n_columns});
    }

    const Grid& grid_;
    const BuiltinRegistry& functions_;
    EvalOptions options_;
    std::vector<CellRef> formulas_;
    std::map<CellRef, std::set<CellRef>> known_cover_;
};

}  // namespace

EvaluatedGrid evaluate_grid(const Grid& grid, const BuiltinRegistry& functions, const EvalOptions& options) {
    return Evaluator(grid, functions, options).run();
}

std::optional<OutputFormat> parse_output_format(std::string_view text) {
    if (text == "tsv") return OutputFormat::tsv;
    if (text == "csv") return OutputFormat::csv;
    if (text == "json") return OutputFormat::json;
    return std::nullopt;
}

namespace {

std::string tsv_field(const std::string& value) {
    std::string out = value;
    std::replace_if(out.begin(), out.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
    return out;
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\r\n") == std::string::npos) {
        return value;
    }
    std::string out = "\"";
    for (char c : value) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_rows(const std::vector<std::vector<std::string>>& rows, OutputFormat format) {
    if (format == OutputFormat::json) {
        return nlohmann::json(rows).dump() + "\n";
    }
    std::string out;
    const char separator = format == OutputFormat::tsv ? '\t' : ',';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) {
                out += separator;
            }
            out += format == OutputFormat::tsv ? tsv_field(row[i]) : csv_field(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string print_grid(const EvaluatedGrid& grid, OutputFormat format) {
    return format_rows(grid.dense(), format);
}

std::string print_table(const ValueTable& table, OutputFormat format) {
    return format_rows(table.data(), format);
}

}  // namespace wikitools
