#include "wikitools/wikidata.hpp"

#include <cstdio>
#include <future>

#include "wikitools/mediawiki.hpp"

namespace wikitools {

using nlohmann::json;

bool EntityId::is_valid(std::string_view text) noexcept {
    if (text.size() < 2 || (text[0] != 'Q' && text[0] != 'P') || text[1] < '1' || text[1] > '9') {
        return false;
    }
    for (char c : text.substr(1)) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    return text.size() <= 19;
}

EntityId EntityId::parse(std::string_view text) {
    if (!is_valid(text)) {
        throw ToolkitError(ErrorKind::parse_failure, "invalid entity id '" + std::string(text) + "'");
    }
    return EntityId(std::string(text));
}

std::uint64_t EntityId::number() const {
    return std::stoull(id_.substr(1));
}

std::strong_ordering operator<=>(const EntityId& a, const EntityId& b) {
    if (auto c = a.id_.front() <=> b.id_.front(); c != 0) {
        return c;
    }
    if (auto c = a.id_.size() <=> b.id_.size(); c != 0) {
        return c;
    }
    return a.id_.compare(b.id_) <=> 0;
}

namespace {

[[noreturn]] void malformed(const std::string& what) {
    throw ToolkitError(ErrorKind::parse_failure, "malformed entity: " + what);
}

SnakType parse_snak_type(const std::string& text) {
    if (text == "value") return SnakType::value;
    if (text == "somevalue") return SnakType::somevalue;
    if (text == "novalue") return SnakType::novalue;
    malformed("snaktype '" + text + "'");
}

Claim parse_claim(const json& statement) {
    const auto snak = statement.find("mainsnak");
    if (snak == statement.end() || !snak->is_object()) {
        malformed("statement without mainsnak");
    }
    Claim claim;
    claim.snak_type = parse_snak_type(snak->value("snaktype", std::string{"value"}));
    if (claim.snak_type == SnakType::value) {
        const auto datavalue = snak->find("datavalue");
        if (datavalue == snak->end() || !datavalue->is_object() || !datavalue->contains("value")) {
            malformed("value snak without datavalue");
        }
        claim.datavalue_type = datavalue->value("type", std::string{});
        claim.value = datavalue->at("value");
    }
    return claim;
}

std::string strip_plus(std::string text) {
    if (!text.empty() && text.front() == '+') {
        text.erase(0, 1);
    }
    return text;
}

std::string render_time(const json& value) {
    if (!value.is_object() || !value.contains("time") || !value["time"].is_string()) {
        malformed("time value");
    }
    const std::string time = value["time"].get<std::string>();
    const int precision = value.value("precision", 11);
    if (time.empty()) {
        malformed("empty time");
    }
    // [+-]YYYY...-MM-DDThh:mm:ssZ
    std::size_t pos = (time.front() == '+' || time.front() == '-') ? 1 : 0;
    const auto year_end = time.find('-', pos);
    if (year_end == std::string::npos || year_end + 6 > time.size()) {
        malformed("time '" + time + "'");
    }
    std::string year = time.substr(pos, year_end - pos);
    if (time.front() == '-') {
        year = "-" + year;
    }
    const std::string month = time.substr(year_end + 1, 2);
    const std::string day = time.substr(year_end + 4, 2);
    if (precision >= 11) {
        return year + "-" + month + "-" + day;
    }
    if (precision == 10) {
        return year + "-" + month;
    }
    return year;
}

std::optional<EntityId> entity_reference(const json& value) {
    if (!value.is_object()) {
        malformed("entity reference");
    }
    if (value.contains("id") && value["id"].is_string()) {
        const auto id = value["id"].get<std::string>();
        return EntityId::is_valid(id) ? std::optional(EntityId::parse(id)) : std::nullopt;
    }
    const auto type = value.value("entity-type", std::string{});
    if (!value.contains("numeric-id") || (type != "item" && type != "property")) {
        return std::nullopt;
    }
    return EntityId::parse((type == "item" ? "Q" : "P") + std::to_string(value["numeric-id"].get<std::uint64_t>()));
}

}  // namespace

std::string render_datavalue(std::string_view datavalue_type, const json& value) {
    if (datavalue_type == "string" || datavalue_type == "url") {
        if (!value.is_string()) {
            malformed(std::string(datavalue_type) + " value");
        }
        return value.get<std::string>();
    }
    if (datavalue_type == "monolingualtext") {
        if (!value.is_object() || !value.contains("text")) {
            malformed("monolingualtext value");
        }
        return value["text"].get<std::string>();
    }
    if (datavalue_type == "quantity") {
        if (!value.is_object() || !value.contains("amount") || !value["amount"].is_string()) {
            malformed("quantity value");
        }
        return strip_plus(value["amount"].get<std::string>());
    }
    if (datavalue_type == "time") {
        return render_time(value);
    }
    if (datavalue_type == "globecoordinate") {
        if (!value.is_object() || !value.contains("latitude") || !value.contains("longitude")) {
            malformed("globecoordinate value");
        }
        char buffer[64];
        std::snprintf(buffer, sizeof buffer, "%.6f,%.6f", value["latitude"].get<double>(),
                      value["longitude"].get<double>());
        return buffer;
    }
    if (datavalue_type == "wikibase-entityid") {
        const auto id = entity_reference(value);
        return id ? id->str() : value.value("id", std::string{});
    }
    throw ToolkitError(ErrorKind::parse_failure, "unrecognized datavalue kind '" + std::string(datavalue_type) + "'");
}

RawClaimSet parse_claims(const json& entity) {
    RawClaimSet raw;
    const auto claims = entity.find("claims");
    // An entity without statements serializes `claims` as [] rather than {}.
    if (claims == entity.end() || (claims->is_array() && claims->empty())) {
        return raw;
    }
    if (!claims->is_object()) {
        malformed("claims");
    }
    for (const auto& [property, statements] : claims->items()) {
        const auto id = EntityId::parse(property);
        if (!id.is_property()) {
            malformed("claim key '" + property + "'");
        }
        if (!statements.is_array()) {
            malformed("claims of " + property);
        }
        std::vector<Claim> list;
        for (const auto& statement : statements) {
            list.push_back(parse_claim(statement));
        }
        if (!list.empty()) {
            raw.emplace(id, std::move(list));
        }
    }
    return raw;
}

std::map<EntityId, SimplifiedValue> simplify_claims(const RawClaimSet& raw) {
    std::map<EntityId, SimplifiedValue> simplified;
    for (const auto& [property, claims] : raw) {
        const Claim* single = nullptr;
        std::size_t value_claims = 0;
        for (const auto& claim : claims) {
            if (claim.snak_type == SnakType::value) {
                single = &claim;
                ++value_claims;
            }
        }
        if (value_claims != 1) {
            continue;
        }
        if (single->datavalue_type == "wikibase-entityid") {
            if (auto id = entity_reference(single->value)) {
                simplified.emplace(property, *id);
                continue;
            }
        }
        simplified.emplace(property, render_datavalue(single->datavalue_type, single->value));
    }
    return simplified;
}

WikidataClient::WikidataClient(Transport& transport, WikidataConfig config)
    : transport_(transport), config_(std::move(config)) {
    if (config_.label_batch_size == 0 || config_.label_batch_size > 50) {
        throw ToolkitError(ErrorKind::bad_input, "label batch size must be in 1..50");
    }
}

json WikidataClient::get(const QueryParams& params) const {
    auto all = params;
    all.emplace_back("action", "wbgetentities");
    all.emplace_back("format", "json");
    const auto spec = HttpRequestSpec::get(build_url(config_.endpoint, all));
    auto response = parse_json_body(transport_.fetch(spec).body, spec.url);
    if (const auto error = response.find("error"); error != response.end()) {
        const auto code = error->is_object() ? error->value("code", std::string{"unknown"}) : "unknown";
        throw ToolkitError(ErrorKind::bad_input, code, spec.url);
    }
    if (!response.contains("entities") || !response["entities"].is_object()) {
        throw ToolkitError(ErrorKind::parse_failure, "response lacks entities", spec.url);
    }
    return response;
}

EntityId WikidataClient::entity_for_article(const QualifiedTitle& article) const {
    const auto response = get({{"sites", article.language().str() + "wiki"},
                               {"titles", to_request_title(article)},
                               {"normalize", "1"},
                               {"props", "info"}});
    const auto& entities = response["entities"];
    if (entities.size() != 1) {
        throw ToolkitError(ErrorKind::parse_failure, "expected one entity for " + article.to_string());
    }
    const auto& entity = entities.begin().value();
    if (!entity.is_object()) {
        throw ToolkitError(ErrorKind::parse_failure, "entity is not an object");
    }
    if (entity.contains("missing")) {
        throw ToolkitError(ErrorKind::not_found, "no Wikidata item for " + article.to_string());
    }
    const auto id = entity.value("id", std::string{});
    if (!EntityId::is_valid(id)) {
        throw ToolkitError(ErrorKind::parse_failure, "entity id '" + id + "' for " + article.to_string());
    }
    return EntityId::parse(id);
}

RawClaimSet WikidataClient::claims(const EntityId& id) const {
    const auto response = get({{"ids", id.str()}, {"props", "claims"}});
    const auto entity = response["entities"].find(id.str());
    if (entity == response["entities"].end() || !entity->is_object()) {
        throw ToolkitError(ErrorKind::parse_failure, "response lacks entity " + id.str());
    }
    if (entity->contains("missing")) {
        throw ToolkitError(ErrorKind::not_found, "entity " + id.str() + " does not exist");
    }
    return parse_claims(*entity);
}

std::map<EntityId, std::string> WikidataClient::resolve_labels(const std::set<EntityId>& ids,
                                                               const LanguageCode& language) const {
    std::map<EntityId, std::string> labels;
    if (ids.empty()) {
        return labels;
    }
    const std::string languages = language.str() == "en" ? "en" : language.str() + "|en";
    std::vector<std::vector<EntityId>> batches;
    for (const auto& id : ids) {
        if (batches.empty() || batches.back().size() == config_.label_batch_size) {
            batches.emplace_back();
        }
        batches.back().push_back(id);
    }
    std::vector<std::future<json>> pending;
    pending.reserve(batches.size());
    for (const auto& batch : batches) {
        std::string joined;
        for (const auto& id : batch) {
            joined += (joined.empty() ? "" : "|") + id.str();
        }
        pending.push_back(std::async(std::launch::async, [this, joined, languages] {
            return get({{"ids", joined}, {"props", "labels"}, {"languages", languages}});
        }));
    }
    for (std::size_t b = 0; b < batches.size(); ++b) {
        const auto response = pending[b].get();
        const auto& entities = response["entities"];
        for (const auto& id : batches[b]) {
            std::string label = id.str();
            const auto entity = entities.find(id.str());
            if (entity != entities.end() && entity->is_object() && entity->contains("labels") &&
                (*entity)["labels"].is_object()) {
                const auto& by_language = (*entity)["labels"];
                for (const auto& code : {language.str(), std::string{"en"}}) {
                    const auto it = by_language.find(code);
                    if (it != by_language.end() && it->is_object() && it->contains("value")) {
                        label = (*it)["value"].get<std::string>();
                        break;
                    }
                }
            }
            labels.emplace(id, std::move(label));
        }
    }
    return labels;
}

std::vector<FactPair> WikidataClient::facts(const QualifiedTitle& article) const {
    const auto item = entity_for_article(article);
    const auto simplified = simplify_claims(claims(item));

    std::set<EntityId> to_label;
    for (const auto& [property, value] : simplified) {
        to_label.insert(property);
        if (const auto* ref = std::get_if<EntityId>(&value)) {
            to_label.insert(*ref);
        }
    }
    const auto labels = resolve_labels(to_label, article.language());

    std::vector<FactPair> facts;
    std::set<std::string> predicates;
    for (const auto& [property, value] : simplified) {
        FactPair fact;
        fact.predicate = labels.at(property);
        if (const auto* ref = std::get_if<EntityId>(&value)) {
            fact.object = labels.at(*ref);
        } else {
            fact.object = std::get<std::string>(value);
        }
        // Two properties sharing a label would break the one-object-per-predicate guarantee.
        if (!fact.predicate.empty() && !fact.object.empty() && predicates.insert(fact.predicate).second) {
            facts.push_back(std::move(fact));
        }
    }
    return facts;
}

}  // namespace wikitools
