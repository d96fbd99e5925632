#pragma once

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wikitools {

enum class ErrorKind {
    bad_input,
    network,
    upstream_status,
    parse_failure,
    not_found,
    rate_limited,
};

std::string_view to_string(ErrorKind kind);

/// Every failure the toolkit reports. Upstream status errors carry the HTTP
/// status both in the detail text and in http_status().
class ToolkitError : public std::runtime_error {
  public:
    ToolkitError(ErrorKind kind, std::string detail, std::optional<std::string> url = std::nullopt);

    static ToolkitError upstream(int status, std::string url);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }
    [[nodiscard]] const std::optional<std::string>& url() const noexcept { return url_; }
    [[nodiscard]] std::optional<int> http_status() const noexcept { return http_status_; }

  private:
    ErrorKind kind_;
    std::string detail_;
    std::optional<std::string> url_;
    std::optional<int> http_status_;
};

/// Wikipedia language edition code (`en`, `de`, `zh-min-nan`, ...). Only the
/// syntax is checked; the upstream API decides whether the wiki exists.
class LanguageCode {
  public:
    static LanguageCode parse(std::string_view text);
    static bool is_valid(std::string_view text) noexcept;

    [[nodiscard]] const std::string& str() const noexcept { return code_; }

    friend bool operator==(const LanguageCode&, const LanguageCode&) = default;
    friend auto operator<=>(const LanguageCode&, const LanguageCode&) = default;

  private:
    explicit LanguageCode(std::string code) : code_(std::move(code)) {}
    std::string code_;
};

/// Parses a comma separated language list such as "de,fr". Blank entries are
/// skipped, so "" yields an empty list.
std::vector<LanguageCode> parse_language_list(std::string_view text);

enum class NamespaceHint { article, category, unknown };

/// `language:Title` pair. The title is kept in human form (spaces).
class QualifiedTitle {
  public:
    /// Infers the namespace hint from the title's prefix.
    QualifiedTitle(LanguageCode language, std::string title);
    QualifiedTitle(LanguageCode language, std::string title, NamespaceHint hint);

    [[nodiscard]] const LanguageCode& language() const noexcept { return language_; }
    [[nodiscard]] const std::string& title() const noexcept { return title_; }
    [[nodiscard]] NamespaceHint namespace_hint() const noexcept { return hint_; }
    [[nodiscard]] bool is_category() const noexcept { return hint_ == NamespaceHint::category; }

    /// `language + ":" + title`
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const QualifiedTitle&, const QualifiedTitle&) = default;

  private:
    LanguageCode language_;
    std::string title_;
    NamespaceHint hint_;
};

/// Splits on the first colon only, so `en:Category:Berlin` keeps the
/// namespace prefix inside the title.
QualifiedTitle parse_qualified(std::string_view input);

/// Underscore form used in request URLs. Each whitespace character becomes
/// one underscore; percent-encoding happens in the transport.
std::string to_request_title(const QualifiedTitle& title);
std::string to_request_title(std::string_view human_title);

/// Inverse of to_request_title for titles coming back from the APIs.
std::string to_human_title(std::string_view request_title);

/// True when the title starts with a known category namespace prefix
/// followed by a colon.
bool has_category_prefix(std::string_view title);

/// Extends the category prefix table (e.g. from a config file).
void add_category_prefix(std::string prefix);
std::vector<std::string> category_prefixes();

std::string_view trim(std::string_view text) noexcept;

}  // namespace wikitools
