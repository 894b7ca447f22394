#include "semcache/lexicon.hpp"

#include <algorithm>
#include <cctype>

#include "semcache/text.hpp"

namespace semcache {

LexiconConfig default_lexicon_config() {
    LexiconConfig c;
    for (char p = 'A'; p <= 'H'; ++p) c.locations.push_back(std::string("Plant-") + p);
    for (const char* w : {"Warehouse-North", "Warehouse-South", "Warehouse-East", "Warehouse-West", "DC-Central"})
        c.locations.emplace_back(w);
    c.value_slots = {
        {"item_code", R"(\bITEM-[0-9]{3}-[A-Z0-9]{3}\b)"},
        {"date", R"(\b[0-9]{4}-[0-9]{2}-[0-9]{2}\b)"},
    };
    c.category_synonyms = {
        {"stock", "inventory", "on-hand", "on hand"},
        {"value", "valuation", "worth", "cost"},
        {"aging", "ageing", "age"},
        {"purchase order", "purchase orders", "po", "procurement", "purchasing"},
        {"consumption", "usage", "issued"},
        {"quantity", "qty", "units"},
    };
    c.structural_templates = {
        R"(^(what is|what's|show( me)?|tell me|give me) (the )?total\b)",
        R"(\bhow many\b)",
        R"(\b(list|show)\b.*\bby\b)",
        R"(\b(trend|over time|monthly)\b)",
        R"(\bfor item( code)?\b.*\b(at|in)\b)",
    };
    c.key_phrases = {"stock value",  "on-hand quantity", "aging bucket", "purchase order", "reorder level",
                     "lead time",    "consumption trend", "slow moving", "safety stock"};
    return c;
}

void to_json(nlohmann::json& j, const LexiconConfig& c) {
    nlohmann::json slots = nlohmann::json::array();
    for (const auto& s : c.value_slots) slots.push_back({{"field", s.field}, {"pattern", s.pattern}});
    j = nlohmann::json{{"locations", c.locations},
                       {"location_field", c.location_field},
                       {"value_slots", slots},
                       {"category_synonyms", c.category_synonyms},
                       {"structural_templates", c.structural_templates},
                       {"key_phrases", c.key_phrases},
                       {"increments",
                        {{"location_norm", c.increments.location_norm},
                         {"category_variation", c.increments.category_variation},
                         {"structural_pattern", c.increments.structural_pattern},
                         {"key_phrase", c.increments.key_phrase}}}};
}

void from_json(const nlohmann::json& j, LexiconConfig& c) {
    c = LexiconConfig{};
    c.locations = j.value("locations", std::vector<std::string>{});
    c.location_field = j.value("location_field", std::string("organization"));
    for (const auto& s : j.value("value_slots", nlohmann::json::array()))
        c.value_slots.push_back({s.at("field").get<std::string>(), s.at("pattern").get<std::string>()});
    c.category_synonyms = j.value("category_synonyms", std::vector<std::vector<std::string>>{});
    c.structural_templates = j.value("structural_templates", std::vector<std::string>{});
    c.key_phrases = j.value("key_phrases", std::vector<std::string>{});
    if (j.contains("increments")) {
        const auto& inc = j.at("increments");
        c.increments.location_norm = inc.value("location_norm", 0.02);
        c.increments.category_variation = inc.value("category_variation", 0.02);
        c.increments.structural_pattern = inc.value("structural_pattern", 0.02);
        c.increments.key_phrase = inc.value("key_phrase", 0.02);
    }
}

namespace {

bool is_word_char(char c) {
    auto uc = static_cast<unsigned char>(c);
    return std::isalnum(uc) || c == '-' || c == '_';
}

// All boundary-respecting occurrences of lowercase `needle` in lowercase `hay`.
std::vector<std::size_t> find_words(const std::string& hay, const std::string& needle) {
    std::vector<std::size_t> out;
    if (needle.empty()) return out;
    std::size_t pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]);
        const std::size_t end = pos + needle.size();
        const bool right_ok = end >= hay.size() || !is_word_char(hay[end]);
        if (left_ok && right_ok) out.push_back(pos);
        pos += 1;
    }
    return out;
}

constexpr auto kRegexFlags = std::regex::ECMAScript | std::regex::icase | std::regex::optimize;

}  // namespace

bool contains_phrase_ci(std::string_view text, std::string_view phrase) {
    return !find_words(text::to_lower(text), text::to_lower(phrase)).empty();
}

DomainLexicon::DomainLexicon(LexiconConfig config) : config_(std::move(config)) {
    for (const auto& s : config_.value_slots) slot_regexes_.emplace_back(s.pattern, kRegexFlags);
    for (const auto& t : config_.structural_templates) templates_.emplace_back(t, kRegexFlags);
}

std::vector<SlotValue> DomainLexicon::extract_locations(std::string_view input) const {
    const std::string lower = text::to_lower(input);
    std::vector<SlotValue> out;
    for (const auto& loc : config_.locations) {
        for (auto pos : find_words(lower, text::to_lower(loc)))
            out.push_back({config_.location_field, std::string(input.substr(pos, loc.size())), pos});
    }
    std::sort(out.begin(), out.end(), [](const SlotValue& a, const SlotValue& b) { return a.position < b.position; });
    return out;
}

std::vector<SlotValue> DomainLexicon::extract_slots(std::string_view input) const {
    auto out = extract_locations(input);
    const std::string s(input);
    for (std::size_t i = 0; i < slot_regexes_.size(); ++i) {
        for (auto it = std::sregex_iterator(s.begin(), s.end(), slot_regexes_[i]); it != std::sregex_iterator(); ++it) {
            out.push_back({config_.value_slots[i].field, it->str(), static_cast<std::size_t>(it->position())});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SlotValue& a, const SlotValue& b) { return a.position < b.position; });
    return out;
}

std::string DomainLexicon::mask(std::string_view input, const std::vector<SlotValue>& slots) const {
    std::string out;
    std::size_t cursor = 0;
    for (const auto& sv : slots) {
        if (sv.position < cursor) continue;  // overlapping match
        out.append(input.substr(cursor, sv.position - cursor));
        out += "<" + sv.field + ">";
        cursor = sv.position + sv.value.size();
    }
    out.append(input.substr(std::min(cursor, input.size())));
    return text::normalize_question(out);
}

std::string DomainLexicon::mask_slots(std::string_view input) const { return mask(input, extract_slots(input)); }

std::string DomainLexicon::mask_locations(std::string_view input) const {
    return mask(input, extract_locations(input));
}

std::vector<std::size_t> DomainLexicon::synonym_groups_present(std::string_view input) const {
    const std::string lower = text::to_lower(input);
    std::vector<std::size_t> out;
    for (std::size_t g = 0; g < config_.category_synonyms.size(); ++g) {
        for (const auto& term : config_.category_synonyms[g]) {
            if (!find_words(lower, text::to_lower(term)).empty()) {
                out.push_back(g);
                break;
            }
        }
    }
    return out;
}

bool DomainLexicon::matches_template(std::string_view input, std::size_t template_index) const {
    const std::string s = text::normalize_question(input);
    return std::regex_search(s, templates_.at(template_index));
}

bool DomainLexicon::contains_phrase(std::string_view input, std::string_view phrase) const {
    return contains_phrase_ci(input, phrase);
}

}  // namespace semcache
