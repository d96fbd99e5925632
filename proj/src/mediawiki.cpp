#include "wikitools/mediawiki.hpp"

#include <algorithm>

namespace wikitools {

using nlohmann::json;

nlohmann::json parse_json_body(const std::string& body, const std::string& url) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw ToolkitError(ErrorKind::parse_failure, std::string("invalid JSON: ") + e.what(), url);
    }
}

namespace {

[[noreturn]] void missing_path(const std::string& path) {
    throw ToolkitError(ErrorKind::parse_failure, "response lacks " + path);
}

NamespaceHint hint_for_namespace(const json& record) {
    if (!record.contains("ns") || !record["ns"].is_number_integer()) {
        return NamespaceHint::unknown;
    }
    switch (record["ns"].get<int>()) {
    case 0: return NamespaceHint::article;
    case 14: return NamespaceHint::category;
    default: return NamespaceHint::unknown;
    }
}

QualifiedTitle title_from_record(const LanguageCode& language, const json& record) {
    if (!record.contains("title") || !record["title"].is_string()) {
        missing_path("title in record");
    }
    return QualifiedTitle(language, record["title"].get<std::string>(), hint_for_namespace(record));
}

void require_article(const QualifiedTitle& title) {
    if (title.is_category()) {
        throw ToolkitError(ErrorKind::bad_input, "expected an article, got category " + title.to_string());
    }
}

void require_category(const QualifiedTitle& title) {
    if (!title.is_category()) {
        throw ToolkitError(ErrorKind::bad_input, "expected a category, got " + title.to_string());
    }
}

}  // namespace

RecordExtractor list_records(std::string list_name) {
    return [list_name = std::move(list_name)](const json& response) {
        const auto query = response.find("query");
        if (query == response.end() || !query->is_object()) {
            missing_path("query");
        }
        const auto list = query->find(list_name);
        if (list == query->end() || !list->is_array()) {
            missing_path("query." + list_name);
        }
        return std::vector<json>(list->begin(), list->end());
    };
}

RecordExtractor page_prop_records(std::string prop_name) {
    return [prop_name = std::move(prop_name)](const json& response) {
        const auto query = response.find("query");
        if (query == response.end() || !query->is_object()) {
            missing_path("query");
        }
        const auto pages = query->find("pages");
        if (pages == query->end() || !pages->is_array() || pages->empty()) {
            missing_path("query.pages");
        }
        const auto& page = pages->front();
        if (page.contains("missing") || page.contains("invalid")) {
            throw ToolkitError(ErrorKind::not_found, "page does not exist: " + page.value("title", std::string{}));
        }
        const auto prop = page.find(prop_name);
        if (prop == page.end()) {
            return std::vector<json>{};
        }
        if (!prop->is_array()) {
            missing_path("query.pages[0]." + prop_name);
        }
        return std::vector<json>(prop->begin(), prop->end());
    };
}

bool TitleList::add(QualifiedTitle title) {
    if (!seen_.insert(title.to_string()).second) {
        return false;
    }
    titles_.push_back(std::move(title));
    return true;
}

bool TitleList::contains(const QualifiedTitle& title) const {
    return seen_.count(title.to_string()) > 0;
}

MediaWikiClient::MediaWikiClient(Transport& transport, MediaWikiConfig config)
    : transport_(transport), config_(std::move(config)) {
    if (config_.max_pages < 1) {
        throw ToolkitError(ErrorKind::bad_input, "max_pages must be at least 1");
    }
}

std::string MediaWikiClient::endpoint(const LanguageCode& language) const {
    std::string url = config_.endpoint_template;
    static constexpr std::string_view placeholder = "{language}";
    for (auto pos = url.find(placeholder); pos != std::string::npos; pos = url.find(placeholder)) {
        url.replace(pos, placeholder.size(), language.str());
    }
    return url;
}

json MediaWikiClient::fetch_json(const std::string& url) const {
    const auto spec = HttpRequestSpec::get(url);
    const auto result = transport_.fetch(spec);
    return parse_json_body(result.body, spec.url);
}

std::vector<json> MediaWikiClient::query_all(const ActionQuery& query, const RecordExtractor& extract) const {
    std::map<std::string, std::string> base = query.params;
    base["action"] = "query";
    base["format"] = "json";
    base["formatversion"] = "2";

    std::vector<json> records;
    std::map<std::string, std::string> continuation;
    for (int page = 0; page < config_.max_pages; ++page) {
        auto params = base;
        for (const auto& [key, value] : continuation) {
            params[key] = value;
        }
        const auto url = build_url(endpoint(query.language), QueryParams(params.begin(), params.end()));
        const auto response = fetch_json(url);
        if (const auto error = response.find("error"); error != response.end()) {
            const auto code = error->is_object() ? error->value("code", std::string{"unknown"}) : "unknown";
            throw ToolkitError(ErrorKind::bad_input, code, url);
        }
        try {
            for (auto& record : extract(response)) {
                records.push_back(std::move(record));
            }
        } catch (const ToolkitError& e) {
            if (e.url()) {
                throw;
            }
            throw ToolkitError(e.kind(), e.detail(), url);
        }
        const auto next = response.find("continue");
        if (next == response.end() || !next->is_object()) {
            break;
        }
        continuation.clear();
        for (const auto& [key, value] : next->items()) {
            continuation[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
    return records;
}

TitleList MediaWikiClient::backlinks(const QualifiedTitle& article, bool redirects_only) const {
    require_article(article);
    const ActionQuery query{article.language(),
                            {{"list", "backlinks"},
                             {"bltitle", to_request_title(article)},
                             {"blnamespace", "0"},
                             {"blfilterredir", redirects_only ? "redirects" : "nonredirects"},
                             {"bllimit", "max"}}};
    TitleList titles;
    for (const auto& record : query_all(query, list_records("backlinks"))) {
        titles.add(title_from_record(article.language(), record));
    }
    return titles;
}

std::vector<QualifiedTitle> MediaWikiClient::langlinks(const QualifiedTitle& article) const {
    const ActionQuery query{article.language(),
                            {{"prop", "langlinks"}, {"titles", to_request_title(article)}, {"lllimit", "max"}}};
    std::vector<QualifiedTitle> links;
    for (const auto& record : query_all(query, page_prop_records("langlinks"))) {
        const auto lang = record.value("lang", std::string{});
        const auto title = record.value("title", std::string{});
        if (!LanguageCode::is_valid(lang) || title.empty()) {
            continue;
        }
        QualifiedTitle link(LanguageCode::parse(lang), title);
        if (std::find(links.begin(), links.end(), link) == links.end()) {
            links.push_back(std::move(link));
        }
    }
    return links;
}

TitleList MediaWikiClient::category_members(const QualifiedTitle& category, MemberKind kind) const {
    require_category(category);
    const ActionQuery query{category.language(),
                            {{"list", "categorymembers"},
                             {"cmtitle", to_request_title(category)},
                             {"cmnamespace", kind == MemberKind::pages ? "0" : "14"},
                             {"cmlimit", "max"}}};
    TitleList titles;
    for (const auto& record : query_all(query, list_records("categorymembers"))) {
        titles.add(title_from_record(category.language(), record));
    }
    return titles;
}

TitleList MediaWikiClient::outbound_links(const QualifiedTitle& article) const {
    require_article(article);
    const ActionQuery query{article.language(),
                            {{"prop", "links"},
                             {"titles", to_request_title(article)},
                             {"plnamespace", "0"},
                             {"pllimit", "max"}}};
    TitleList titles;
    for (const auto& record : query_all(query, page_prop_records("links"))) {
        titles.add(title_from_record(article.language(), record));
    }
    return titles;
}

GeoCoordinate MediaWikiClient::geocoordinates(const QualifiedTitle& article) const {
    require_article(article);
    const ActionQuery query{article.language(), {{"prop", "coordinates"}, {"titles", to_request_title(article)}}};
    const auto records = query_all(query, page_prop_records("coordinates"));
    if (records.empty()) {
        throw ToolkitError(ErrorKind::not_found, "no coordinates for " + article.to_string());
    }
    auto chosen = std::find_if(records.begin(), records.end(),
                               [](const json& r) { return r.value("primary", false); });
    if (chosen == records.end()) {
        chosen = records.begin();
    }
    const auto lat = chosen->find("lat");
    const auto lon = chosen->find("lon");
    if (lat == chosen->end() || lon == chosen->end() || !lat->is_number() || !lon->is_number()) {
        throw ToolkitError(ErrorKind::parse_failure, "coordinate record lacks lat/lon");
    }
    GeoCoordinate coordinate{lat->get<double>(), lon->get<double>()};
    if (coordinate.latitude < -90.0 || coordinate.latitude > 90.0 || coordinate.longitude < -180.0 ||
        coordinate.longitude > 180.0) {
        throw ToolkitError(ErrorKind::parse_failure, "coordinate out of range for " + article.to_string());
    }
    return coordinate;
}

DailyCountSeries MediaWikiClient::daily_edit_counts(const QualifiedTitle& article, Date start, Date end) const {
    if (start > end) {
        throw ToolkitError(ErrorKind::bad_input, "start " + start.iso() + " is after end " + end.iso());
    }
    const ActionQuery query{article.language(),
                            {{"prop", "revisions"},
                             {"titles", to_request_title(article)},
                             {"rvprop", "timestamp"},
                             {"rvlimit", "max"},
                             {"rvdir", "newer"},
                             {"rvstart", start.iso() + "T00:00:00Z"},
                             {"rvend", end.iso() + "T23:59:59Z"}}};
    std::map<Date, std::uint64_t> counts;
    for (const auto& record : query_all(query, page_prop_records("revisions"))) {
        const auto timestamp = record.value("timestamp", std::string{});
        if (timestamp.size() < 10) {
            throw ToolkitError(ErrorKind::parse_failure, "revision without timestamp");
        }
        Date day;
        try {
            day = Date::parse_iso(std::string_view(timestamp).substr(0, 10));
        } catch (const ToolkitError&) {
            throw ToolkitError(ErrorKind::parse_failure, "bad revision timestamp '" + timestamp + "'");
        }
        if (day >= start && day <= end) {
            ++counts[day];
        }
    }
    return DailyCountSeries::dense(start, end, counts);
}

}  // namespace wikitools
