#include "wikitools/core.hpp"

#include <algorithm>
#include <mutex>

namespace wikitools {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::bad_input: return "BadInput";
    case ErrorKind::network: return "Network";
    case ErrorKind::upstream_status: return "UpstreamStatus";
    case ErrorKind::parse_failure: return "ParseFailure";
    case ErrorKind::not_found: return "NotFound";
    case ErrorKind::rate_limited: return "RateLimited";
    }
    return "Unknown";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& detail, const std::optional<std::string>& url) {
    std::string message{to_string(kind)};
    message += ": ";
    message += detail;
    if (url) {
        message += " (" + *url + ")";
    }
    return message;
}

}  // namespace

ToolkitError::ToolkitError(ErrorKind kind, std::string detail, std::optional<std::string> url)
    : std::runtime_error(format_message(kind, detail, url)),
      kind_(kind),
      detail_(std::move(detail)),
      url_(std::move(url)) {}

ToolkitError ToolkitError::upstream(int status, std::string url) {
    ToolkitError error(ErrorKind::upstream_status, "HTTP " + std::to_string(status), std::move(url));
    error.http_status_ = status;
    return error;
}

std::string_view trim(std::string_view text) noexcept {
    constexpr std::string_view spaces = " \t\r\n\v\f";
    const auto first = text.find_first_not_of(spaces);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(spaces);
    return text.substr(first, last - first + 1);
}

bool LanguageCode::is_valid(std::string_view text) noexcept {
    if (text.size() < 2 || text.size() > 12) {
        return false;
    }
    if (text.front() < 'a' || text.front() > 'z') {
        return false;
    }
    return std::all_of(text.begin(), text.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
    });
}

LanguageCode LanguageCode::parse(std::string_view text) {
    std::string code{trim(text)};
    std::transform(code.begin(), code.end(), code.begin(), [](unsigned char c) {
        return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    });
    if (!is_valid(code)) {
        throw ToolkitError(ErrorKind::bad_input, "invalid language code '" + std::string(text) + "'");
    }
    return LanguageCode(std::move(code));
}

std::vector<LanguageCode> parse_language_list(std::string_view text) {
    std::vector<LanguageCode> languages;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto item = trim(text.substr(start, end - start));
        if (!item.empty()) {
            auto code = LanguageCode::parse(item);
            if (std::find(languages.begin(), languages.end(), code) == languages.end()) {
                languages.push_back(std::move(code));
            }
        }
        start = end + 1;
    }
    return languages;
}

namespace {

struct PrefixTable {
    std::mutex mutex;
    std::vector<std::string> prefixes{"Category", "Kategorie", "Catégorie", "Categoría"};
};

PrefixTable& prefix_table() {
    static PrefixTable table;
    return table;
}

}  // namespace

void add_category_prefix(std::string prefix) {
    auto& table = prefix_table();
    std::lock_guard lock(table.mutex);
    if (std::find(table.prefixes.begin(), table.prefixes.end(), prefix) == table.prefixes.end()) {
        table.prefixes.push_back(std::move(prefix));
    }
}

std::vector<std::string> category_prefixes() {
    auto& table = prefix_table();
    std::lock_guard lock(table.mutex);
    return table.prefixes;
}

bool has_category_prefix(std::string_view title) {
    const auto colon = title.find(':');
    if (colon == std::string_view::npos || colon == 0) {
        return false;
    }
    // API titles use spaces, request titles underscores; both are accepted.
    std::string prefix = to_human_title(title.substr(0, colon));
    auto& table = prefix_table();
    std::lock_guard lock(table.mutex);
    return std::find(table.prefixes.begin(), table.prefixes.end(), prefix) != table.prefixes.end();
}

QualifiedTitle::QualifiedTitle(LanguageCode language, std::string title)
    : QualifiedTitle(std::move(language), title,
                     has_category_prefix(title) ? NamespaceHint::category : NamespaceHint::article) {}

QualifiedTitle::QualifiedTitle(LanguageCode language, std::string title, NamespaceHint hint)
    : language_(std::move(language)), title_(std::move(title)), hint_(hint) {
    if (title_.empty()) {
        throw ToolkitError(ErrorKind::bad_input, "empty title");
    }
    if (trim(title_).size() != title_.size()) {
        throw ToolkitError(ErrorKind::bad_input, "title has surrounding whitespace: '" + title_ + "'");
    }
}

std::string QualifiedTitle::to_string() const {
    return language_.str() + ":" + title_;
}

QualifiedTitle parse_qualified(std::string_view input) {
    const auto colon = input.find(':');
    if (colon == std::string_view::npos) {
        throw ToolkitError(ErrorKind::bad_input,
                           "expected language:Title, got '" + std::string(input) + "'");
    }
    const auto language = trim(input.substr(0, colon));
    const auto title = trim(input.substr(colon + 1));
    if (language.empty()) {
        throw ToolkitError(ErrorKind::bad_input, "missing language in '" + std::string(input) + "'");
    }
    if (title.empty()) {
        throw ToolkitError(ErrorKind::bad_input, "missing title in '" + std::string(input) + "'");
    }
    return QualifiedTitle(LanguageCode::parse(language), std::string(title));
}

std::string to_request_title(std::string_view human_title) {
    std::string out;
    out.reserve(human_title.size());
    for (std::size_t i = 0; i < human_title.size(); ++i) {
        const char c = human_title[i];
        switch (c) {
        case ' ':
        case '\t':
        case '\n':
        case '\r':
        case '\v':
        case '\f':
            out += '_';
            break;
        default:
            // U+00A0 NO-BREAK SPACE
            if (static_cast<unsigned char>(c) == 0xC2 && i + 1 < human_title.size() &&
                static_cast<unsigned char>(human_title[i + 1]) == 0xA0) {
                out += '_';
                ++i;
            } else {
                out += c;
            }
        }
    }
    return out;
}

std::string to_request_title(const QualifiedTitle& title) {
    return to_request_title(title.title());
}

std::string to_human_title(std::string_view request_title) {
    std::string out{request_title};
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
}

}  // namespace wikitools
