#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "wikitools/core.hpp"
#include "wikitools/transport.hpp"

namespace wikitools {

/// Wikidata item (`Q64`) or property (`P300`) identifier.
class EntityId {
  public:
    static EntityId parse(std::string_view text);
    static bool is_valid(std::string_view text) noexcept;

    [[nodiscard]] const std::string& str() const noexcept { return id_; }
    [[nodiscard]] bool is_property() const noexcept { return id_.front() == 'P'; }
    [[nodiscard]] bool is_item() const noexcept { return id_.front() == 'Q'; }
    [[nodiscard]] std::uint64_t number() const;

    friend bool operator==(const EntityId&, const EntityId&) = default;
    /// Orders by kind, then numerically (P2 before P10).
    friend std::strong_ordering operator<=>(const EntityId& a, const EntityId& b);

  private:
    explicit EntityId(std::string id) : id_(std::move(id)) {}
    std::string id_;
};

enum class SnakType { value, somevalue, novalue };

/// A statement's main snak. `datavalue_type` is the wire name
/// (`wikibase-entityid`, `time`, ...) and `value` the raw datavalue payload;
/// both are empty for somevalue/novalue snaks.
struct Claim {
    SnakType snak_type = SnakType::value;
    std::string datavalue_type;
    nlohmann::json value;
};

/// Claims grouped by property, in the order the API listed them.
using RawClaimSet = std::map<EntityId, std::vector<Claim>>;

/// Reads `entity.claims` from a wbgetentities entity object.
RawClaimSet parse_claims(const nlohmann::json& entity);

/// Either a reference to another entity (label resolved later) or final text.
using SimplifiedValue = std::variant<EntityId, std::string>;

/// Keeps each property that has exactly one value-bearing claim once
/// somevalue/novalue snaks are dropped, and reduces that claim to a value.
/// Multi-value properties are discarded rather than picking one.
std::map<EntityId, SimplifiedValue> simplify_claims(const RawClaimSet& raw);

/// Text rendering of a single non-entity datavalue (time truncated to its
/// precision, quantity without a leading `+`, coordinates as `lat,lon`).
std::string render_datavalue(std::string_view datavalue_type, const nlohmann::json& value);

struct FactPair {
    std::string predicate;
    std::string object;

    friend bool operator==(const FactPair&, const FactPair&) = default;
};

struct WikidataConfig {
    std::string endpoint = "https://www.wikidata.org/w/api.php";
    std::size_t label_batch_size = 50;
};

class WikidataClient {
  public:
    WikidataClient(Transport& transport, WikidataConfig config = {});

    EntityId entity_for_article(const QualifiedTitle& article) const;
    RawClaimSet claims(const EntityId& id) const;
    /// Label in `language`, then English, then the raw id. Batches are
    /// fetched concurrently; the result does not depend on completion order.
    std::map<EntityId, std::string> resolve_labels(const std::set<EntityId>& ids, const LanguageCode& language) const;
    /// Facts sorted by numeric property id.
    std::vector<FactPair> facts(const QualifiedTitle& article) const;

  private:
    nlohmann::json get(const QueryParams& params) const;

    Transport& transport_;
    WikidataConfig config_;
};

}  // namespace wikitools
