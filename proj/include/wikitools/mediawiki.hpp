#pragma once

#include <functional>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "wikitools/core.hpp"
#include "wikitools/date.hpp"
#include "wikitools/transport.hpp"

namespace wikitools {

/// An `action=query` request against one language edition. `action=query`,
/// `format=json` and `formatversion=2` are always sent.
struct ActionQuery {
    LanguageCode language;
    std::map<std::string, std::string> params;
};

/// Pulls the records of interest out of one response page.
using RecordExtractor = std::function<std::vector<nlohmann::json>(const nlohmann::json& response)>;

/// Array at `query.<list_name>` (list modules such as backlinks).
RecordExtractor list_records(std::string list_name);
/// Array at `query.pages[0].<prop_name>` (prop modules on a single title).
/// The prop key is optional since the API omits it for empty results; a
/// page flagged `missing` is NotFound.
RecordExtractor page_prop_records(std::string prop_name);

/// Deduplicated titles in first-seen order.
class TitleList {
  public:
    TitleList() = default;

    /// Returns false when the title was already present.
    bool add(QualifiedTitle title);

    [[nodiscard]] const std::vector<QualifiedTitle>& titles() const noexcept { return titles_; }
    [[nodiscard]] std::size_t size() const noexcept { return titles_.size(); }
    [[nodiscard]] bool empty() const noexcept { return titles_.empty(); }
    [[nodiscard]] bool contains(const QualifiedTitle& title) const;

  private:
    std::vector<QualifiedTitle> titles_;
    std::unordered_set<std::string> seen_;
};

struct GeoCoordinate {
    double latitude = 0.0;
    double longitude = 0.0;
};

enum class MemberKind { pages, subcategories };

struct MediaWikiConfig {
    std::string endpoint_template = "https://{language}.wikipedia.org/w/api.php";
    int max_pages = 50;
};

class MediaWikiClient {
  public:
    MediaWikiClient(Transport& transport, MediaWikiConfig config = {});

    [[nodiscard]] std::string endpoint(const LanguageCode& language) const;

    /// Follows `continue` envelopes until exhausted or until max_pages
    /// requests were made, concatenating the extracted records.
    std::vector<nlohmann::json> query_all(const ActionQuery& query, const RecordExtractor& extract) const;

    /// With redirects_only the request matches the classic synonym recipe
    /// (namespace 0, redirect filter, limit max); otherwise only
    /// non-redirect backlinks are listed.
    TitleList backlinks(const QualifiedTitle& article, bool redirects_only) const;
    std::vector<QualifiedTitle> langlinks(const QualifiedTitle& article) const;
    TitleList category_members(const QualifiedTitle& category, MemberKind kind) const;
    TitleList outbound_links(const QualifiedTitle& article) const;
    GeoCoordinate geocoordinates(const QualifiedTitle& article) const;
    /// Revisions bucketed per UTC day, dense over [start, end].
    DailyCountSeries daily_edit_counts(const QualifiedTitle& article, Date start, Date end) const;

  private:
    nlohmann::json fetch_json(const std::string& url) const;

    Transport& transport_;
    MediaWikiConfig config_;
};

/// Parses a response body, mapping syntax errors to ParseFailure.
nlohmann::json parse_json_body(const std::string& body, const std::string& url);

}  // namespace wikitools
