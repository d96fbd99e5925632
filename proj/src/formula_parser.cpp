#include <cctype>
#include <charconv>

#include "wikitools/formula.hpp"

namespace wikitools {

std::uint32_t column_index(std::string_view letters) {
    if (letters.empty() || letters.size() > 5) {
        throw ToolkitError(ErrorKind::bad_input, "bad column '" + std::string(letters) + "'");
    }
    std::uint32_t index = 0;
    for (char c : letters) {
        const auto upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (upper < 'A' || upper > 'Z') {
            throw ToolkitError(ErrorKind::bad_input, "bad column '" + std::string(letters) + "'");
        }
        index = index * 26 + static_cast<std::uint32_t>(upper - 'A' + 1);
    }
    return index;
}

std::string column_letters(std::uint32_t index) {
    if (index == 0) {
        throw ToolkitError(ErrorKind::bad_input, "column index must be >= 1");
    }
    std::string letters;
    while (index > 0) {
        --index;
        letters.insert(letters.begin(), static_cast<char>('A' + index % 26));
        index /= 26;
    }
    return letters;
}

CellRef CellRef::parse(std::string_view text) {
    std::size_t split = 0;
    while (split < text.size() && std::isalpha(static_cast<unsigned char>(text[split]))) {
        ++split;
    }
    const auto digits = text.substr(split);
    if (split == 0 || digits.empty() || digits.front() == '0' || digits.size() > 9) {
        throw ToolkitError(ErrorKind::bad_input, "bad cell reference '" + std::string(text) + "'");
    }
    std::uint32_t row = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), row);
    if (ec != std::errc{} || end != digits.data() + digits.size()) {
        throw ToolkitError(ErrorKind::bad_input, "bad cell reference '" + std::string(text) + "'");
    }
    return CellRef{column_index(text.substr(0, split)), row};
}

std::string CellRef::to_string() const {
    return column_letters(column) + std::to_string(row);
}

bool operator==(const FormulaExpr& a, const FormulaExpr& b) {
    if (a.node.index() != b.node.index()) {
        return false;
    }
    return std::visit(
        [&](const auto& lhs) {
            using T = std::decay_t<decltype(lhs)>;
            const auto& rhs = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, StringLiteral>) {
                return lhs.text == rhs.text;
            } else if constexpr (std::is_same_v<T, NumberLiteral>) {
                return lhs.value == rhs.value;
            } else if constexpr (std::is_same_v<T, CellReference>) {
                return lhs.ref == rhs.ref;
            } else {
                return lhs.name == rhs.name && lhs.args == rhs.args;
            }
        },
        a.node);
}

FormulaSyntaxError::FormulaSyntaxError(std::size_t offset, std::string reason)
    : ToolkitError(ErrorKind::parse_failure, reason + " at offset " + std::to_string(offset)),
      offset_(offset),
      reason_(std::move(reason)) {}

namespace {

class Parser {
  public:
    explicit Parser(std::string_view source) : source_(source) {}

    FormulaExpr parse() {
        if (source_.empty() || source_.front() != '=') {
            throw FormulaSyntaxError(0, "formula must start with '='");
        }
        pos_ = 1;
        skip_space();
        auto expr = parse_expr();
        skip_space();
        if (pos_ != source_.size()) {
            throw FormulaSyntaxError(pos_, "unexpected '" + std::string(1, source_[pos_]) + "'");
        }
        return expr;
    }

  private:
    bool at_end() const { return pos_ >= source_.size(); }
    char peek() const { return at_end() ? '\0' : source_[pos_]; }

    void skip_space() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(source_[pos_]))) {
            ++pos_;
        }
    }

    FormulaExpr parse_expr() {
        if (at_end()) {
            throw FormulaSyntaxError(pos_, "expected an expression");
        }
        const char c = peek();
        if (c == '"') {
            return parse_string();
        }
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            return parse_identifier();
        }
        throw FormulaSyntaxError(pos_, "unexpected '" + std::string(1, c) + "'");
    }

    FormulaExpr parse_string() {
        const auto open = pos_++;
        std::string text;
        while (true) {
            if (at_end()) {
                throw FormulaSyntaxError(open, "unterminated string");
            }
            const char c = source_[pos_++];
            if (c == '"') {
                if (peek() == '"') {
                    text += '"';
                    ++pos_;
                    continue;
                }
                break;
            }
            text += c;
        }
        return FormulaExpr{StringLiteral{std::move(text)}};
    }

    FormulaExpr parse_number() {
        const auto start = pos_;
        if (peek() == '-') {
            ++pos_;
        }
        const auto digits_start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            ++pos_;
        }
        if (pos_ == digits_start) {
            throw FormulaSyntaxError(start, "expected a number");
        }
        if (peek() == '.') {
            ++pos_;
            const auto fraction_start = pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                ++pos_;
            }
            if (pos_ == fraction_start) {
                throw FormulaSyntaxError(pos_, "expected digits after '.'");
            }
        }
        double value = 0.0;
        const auto first = source_.data() + start;
        const auto last = source_.data() + pos_;
        const auto [end, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || end != last) {
            throw FormulaSyntaxError(start, "number out of range");
        }
        return FormulaExpr{NumberLiteral{value}};
    }

    FormulaExpr parse_identifier() {
        const auto start = pos_;
        while (std::isalnum(static_cast<unsigned char>(peek()))) {
            ++pos_;
        }
        std::string word{source_.substr(start, pos_ - start)};
        for (auto& c : word) {
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        const auto after_word = pos_;
        skip_space();
        if (peek() == '(') {
            return parse_call(std::move(word));
        }
        pos_ = after_word;
        try {
            return FormulaExpr{CellReference{CellRef::parse(word)}};
        } catch (const ToolkitError&) {
            throw FormulaSyntaxError(start, "'" + word + "' is neither a cell reference nor a call");
        }
    }

    FormulaExpr parse_call(std::string name) {
        const auto open = pos_++;
        Call call{std::move(name), {}};
        skip_space();
        if (peek() == ')') {
            ++pos_;
            return FormulaExpr{std::move(call)};
        }
        while (true) {
            skip_space();
            if (at_end()) {
                throw FormulaSyntaxError(open, "unclosed '('");
            }
            call.args.push_back(parse_expr());
            skip_space();
            if (at_end()) {
                throw FormulaSyntaxError(open, "unclosed '('");
            }
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            if (peek() == ')') {
                ++pos_;
                return FormulaExpr{std::move(call)};
            }
            throw FormulaSyntaxError(pos_, "expected ',' or ')'");
        }
    }

    std::string_view source_;
    std::size_t pos_ = 0;
};

void print_expr(const FormulaExpr& expr, std::string& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, StringLiteral>) {
                out += '"';
                for (char c : node.text) {
                    out += c;
                    if (c == '"') {
                        out += '"';
                    }
                }
                out += '"';
            } else if constexpr (std::is_same_v<T, NumberLiteral>) {
                out += format_decimal(node.value);
            } else if constexpr (std::is_same_v<T, CellReference>) {
                out += node.ref.to_string();
            } else {
                out += node.name;
                out += '(';
                for (std::size_t i = 0; i < node.args.size(); ++i) {
                    if (i > 0) {
                        out += ", ";
                    }
                    print_expr(node.args[i], out);
                }
                out += ')';
            }
        },
        expr.node);
}

void collect_references(const FormulaExpr& expr, std::vector<CellRef>& out) {
    if (const auto* ref = std::get_if<CellReference>(&expr.node)) {
        out.push_back(ref->ref);
    } else if (const auto* call = std::get_if<Call>(&expr.node)) {
        for (const auto& arg : call->args) {
            collect_references(arg, out);
        }
    }
}

}  // namespace

FormulaExpr parse_formula(std::string_view source) {
    return Parser(source).parse();
}

std::string print_formula(const FormulaExpr& expr) {
    std::string out = "=";
    print_expr(expr, out);
    return out;
}

std::vector<CellRef> referenced_cells(const FormulaExpr& expr) {
    std::vector<CellRef> refs;
    collect_references(expr, refs);
    return refs;
}

}  // namespace wikitools
