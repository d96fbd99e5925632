#include "wikitools/formula.hpp"

namespace wikitools {

namespace {

void require_arity(const std::vector<std::string>& args, std::size_t min, std::size_t max, std::string_view name) {
    if (args.size() < min || args.size() > max) {
        throw ToolkitError(ErrorKind::bad_input, std::string(name) + " takes " + std::to_string(min) +
                                                     (min == max ? "" : ".." + std::to_string(max)) + " arguments");
    }
}

std::optional<std::vector<LanguageCode>> language_arg(const std::vector<std::string>& args, std::size_t index) {
    if (index >= args.size()) {
        return std::nullopt;
    }
    return parse_language_list(args[index]);
}

std::optional<Date> date_arg(const std::vector<std::string>& args, std::size_t index) {
    if (index >= args.size() || trim(args[index]).empty()) {
        return std::nullopt;
    }
    return Date::parse_iso(trim(args[index]));
}

using Unary = ValueTable (Toolkit::*)(std::string_view) const;

// Wraps a one-argument function; a blank article gives an empty result.
Builtin unary(const Toolkit& toolkit, Unary method, std::string name, std::size_t columns) {
    return [&toolkit, method, name = std::move(name), columns](const std::vector<std::string>& args) {
        require_arity(args, 1, 1, name);
        if (trim(args[0]).empty()) {
            return ValueTable(columns);
        }
        return (toolkit.*method)(args[0]);
    };
}

}  // namespace

BuiltinRegistry wiki_builtins(const Toolkit& toolkit) {
    BuiltinRegistry registry;
    registry.add("WIKITRANSLATE", [&toolkit](const std::vector<std::string>& args) {
        require_arity(args, 1, 2, "WIKITRANSLATE");
        return trim(args[0]).empty() ? ValueTable(1) : toolkit.wiki_translate(args[0], language_arg(args, 1));
    });
    registry.add("WIKIEXPAND", [&toolkit](const std::vector<std::string>& args) {
        require_arity(args, 1, 2, "WIKIEXPAND");
        return trim(args[0]).empty() ? ValueTable(1) : toolkit.wiki_expand(args[0], language_arg(args, 1));
    });
    registry.add("WIKISYNONYMS", unary(toolkit, &Toolkit::wiki_synonyms, "WIKISYNONYMS", 1));
    registry.add("WIKICATEGORYMEMBERS", unary(toolkit, &Toolkit::wiki_category_members, "WIKICATEGORYMEMBERS", 1));
    registry.add("WIKISUBCATEGORIES", unary(toolkit, &Toolkit::wiki_subcategories, "WIKISUBCATEGORIES", 1));
    registry.add("WIKIINBOUNDLINKS", unary(toolkit, &Toolkit::wiki_inbound_links, "WIKIINBOUNDLINKS", 1));
    registry.add("WIKIOUTBOUNDLINKS", unary(toolkit, &Toolkit::wiki_outbound_links, "WIKIOUTBOUNDLINKS", 1));
    registry.add("WIKIMUTUALLINKS", unary(toolkit, &Toolkit::wiki_mutual_links, "WIKIMUTUALLINKS", 1));
    registry.add("WIKIGEOCOORDINATES", unary(toolkit, &Toolkit::wiki_geocoordinates, "WIKIGEOCOORDINATES", 2));
    registry.add("WIKIDATAFACTS", unary(toolkit, &Toolkit::wiki_data_facts, "WIKIDATAFACTS", 2));
    registry.add("WIKIPAGEVIEWS", [&toolkit](const std::vector<std::string>& args) {
        require_arity(args, 1, 3, "WIKIPAGEVIEWS");
        return trim(args[0]).empty() ? ValueTable(2)
                                     : toolkit.wiki_pageviews(args[0], date_arg(args, 1), date_arg(args, 2));
    });
    registry.add("WIKIPAGEEDITS", [&toolkit](const std::vector<std::string>& args) {
        require_arity(args, 1, 3, "WIKIPAGEEDITS");
        return trim(args[0]).empty() ? ValueTable(2)
                                     : toolkit.wiki_page_edits(args[0], date_arg(args, 1), date_arg(args, 2));
    });
    return registry;
}

}  // namespace wikitools
