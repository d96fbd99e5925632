#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wikitools/core.hpp"
#include "wikitools/functions.hpp"

namespace wikitools {

/// 1-based column/row address such as `B7`.
struct CellRef {
    std::uint32_t column = 1;
    std::uint32_t row = 1;

    static CellRef parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const CellRef&, const CellRef&) = default;
    /// Row-major: A1 < B1 < A2.
    friend std::strong_ordering operator<=>(const CellRef& a, const CellRef& b) {
        if (auto c = a.row <=> b.row; c != 0) {
            return c;
        }
        return a.column <=> b.column;
    }
};

/// `A` -> 1, `Z` -> 26, `AA` -> 27.
std::uint32_t column_index(std::string_view letters);
std::string column_letters(std::uint32_t index);

struct FormulaExpr;

struct StringLiteral {
    std::string text;
};

struct NumberLiteral {
    double value = 0.0;
};

struct CellReference {
    CellRef ref;
};

struct Call {
    std::string name;
    std::vector<FormulaExpr> args;
};

struct FormulaExpr {
    std::variant<StringLiteral, NumberLiteral, CellReference, Call> node;
};

bool operator==(const FormulaExpr& a, const FormulaExpr& b);

/// ParseFailure raised by the formula parser; offset() is the 0-based
/// position in the source text (an unclosed call reports its `(`).
class FormulaSyntaxError : public ToolkitError {
  public:
    FormulaSyntaxError(std::size_t offset, std::string reason);
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

  private:
    std::size_t offset_;
    std::string reason_;
};

/// Parses `=EXPR` where EXPR is a double-quoted string (`""` escapes a
/// quote), a decimal number, a cell reference or `NAME(arg, ...)`.
FormulaExpr parse_formula(std::string_view source);
/// Canonical source text, leading `=` included.
std::string print_formula(const FormulaExpr& expr);
/// Every cell reference in the expression, in source order.
std::vector<CellRef> referenced_cells(const FormulaExpr& expr);

struct Formula {
    std::string source;
    FormulaExpr expr;
};

using CellContent = std::variant<std::string, Formula>;

/// Sparse input sheet: literal text or formulas.
class Grid {
  public:
    /// `=`-prefixed text becomes a formula, empty text clears the cell.
    void set(CellRef cell, std::string_view raw);
    void set_literal(CellRef cell, std::string text);
    void set_formula(CellRef cell, std::string_view source);

    [[nodiscard]] const std::map<CellRef, CellContent>& cells() const noexcept { return cells_; }
    [[nodiscard]] bool empty() const noexcept { return cells_.empty(); }

    /// Tab separated fields, one row per line.
    static Grid from_tsv(std::string_view text);

  private:
    std::map<CellRef, CellContent> cells_;
};

namespace error_token {
inline constexpr std::string_view name = "#NAME";
inline constexpr std::string_view cycle = "#CYCLE";
inline constexpr std::string_view spill = "#SPILL";
inline constexpr std::string_view value = "#VALUE";
}  // namespace error_token

struct EvaluatedCell {
    enum class Origin { literal, formula, spill };

    std::string text;
    Origin origin = Origin::literal;
    bool is_error = false;
    /// For spilled cells, the formula that produced them.
    std::optional<CellRef> anchor;
};

struct SpillRegion {
    CellRef anchor;
    std::uint32_t rows = 1;
    std::uint32_t columns = 1;
};

class EvaluatedGrid {
  public:
    EvaluatedGrid() = default;
    EvaluatedGrid(std::map<CellRef, EvaluatedCell> cells, std::vector<SpillRegion> spills);

    [[nodiscard]] const std::map<CellRef, EvaluatedCell>& cells() const noexcept { return cells_; }
    [[nodiscard]] const std::vector<SpillRegion>& spills() const noexcept { return spills_; }
    /// Empty string for cells never written.
    [[nodiscard]] std::string value(CellRef cell) const;
    [[nodiscard]] std::uint32_t rows() const noexcept;
    [[nodiscard]] std::uint32_t columns() const noexcept;
    /// Dense rows from A1 to the last occupied row/column.
    [[nodiscard]] std::vector<std::vector<std::string>> dense() const;

  private:
    std::map<CellRef, EvaluatedCell> cells_;
    std::vector<SpillRegion> spills_;
};

using Builtin = std::function<ValueTable(const std::vector<std::string>& args)>;

class BuiltinRegistry {
  public:
    void add(std::string name, Builtin function);
    [[nodiscard]] const Builtin* find(std::string_view name) const;
    [[nodiscard]] std::vector<std::string> names() const;

  private:
    std::map<std::string, Builtin, std::less<>> functions_;
};

/// WIKITRANSLATE, WIKISYNONYMS, ... bound to a toolkit. An empty article
/// argument yields an empty result instead of an error.
BuiltinRegistry wiki_builtins(const Toolkit& toolkit);

struct EvalOptions {
    std::size_t max_cells = 100'000;
    /// Evaluate independent cells of one dependency level on worker threads.
    bool concurrent = false;
};

/// Evaluates every formula in dependency order. Table results spill right
/// and down from the formula cell. Failures become cell tokens: #CYCLE on
/// every cell of a reference cycle, #SPILL when a spill would overwrite
/// content or another spill, #NAME for unknown functions and #VALUE when a
/// function fails or reads an error. Throws BadInput when the result would
/// hold more than max_cells cells.
EvaluatedGrid evaluate_grid(const Grid& grid, const BuiltinRegistry& functions, const EvalOptions& options = {});

enum class OutputFormat { tsv, csv, json };

std::optional<OutputFormat> parse_output_format(std::string_view text);

/// Shared table writer for grids and function results. TSV has no quoting,
/// so tabs and newlines inside values are written as spaces.
std::string format_rows(const std::vector<std::vector<std::string>>& rows, OutputFormat format);
std::string print_grid(const EvaluatedGrid& grid, OutputFormat format);
std::string print_table(const ValueTable& table, OutputFormat format);

}  // namespace wikitools
