#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace semcache {

// A literal value slot recognized by pattern, e.g. item codes or dates.
struct SlotPattern {
    std::string field;
    std::string pattern;  // ECMAScript regex, matched case-insensitively
};

struct BoostIncrements {
    double location_norm = 0.02;
    double category_variation = 0.02;
    double structural_pattern = 0.02;
    double key_phrase = 0.02;
};

struct LexiconConfig {
    std::vector<std::string> locations;
    std::string location_field = "organization";
    std::vector<SlotPattern> value_slots;
    std::vector<std::vector<std::string>> category_synonyms;
    std::vector<std::string> structural_templates;  // regexes, case-insensitive
    std::vector<std::string> key_phrases;
    BoostIncrements increments;
};

// The inventory-analytics vocabulary used by the bundled mocks and replay tooling.
LexiconConfig default_lexicon_config();

void to_json(nlohmann::json& j, const LexiconConfig& c);
void from_json(const nlohmann::json& j, LexiconConfig& c);

struct SlotValue {
    std::string field;
    std::string value;  // as written in the text
    std::size_t position = 0;
};

/// Compiled domain lexicon. Immutable after construction and safe to share.
class DomainLexicon {
public:
    explicit DomainLexicon(LexiconConfig config = default_lexicon_config());

    const LexiconConfig& config() const noexcept { return config_; }

    // Locations and pattern slots in order of appearance.
    std::vector<SlotValue> extract_slots(std::string_view text) const;
    std::vector<SlotValue> extract_locations(std::string_view text) const;

    // Normalized question with every slot value replaced by "<field>".
    std::string mask_slots(std::string_view text) const;
    // Normalized question with only locations replaced.
    std::string mask_locations(std::string_view text) const;

    // Index of the first synonym group with a member present, per group.
    std::vector<std::size_t> synonym_groups_present(std::string_view text) const;
    bool matches_template(std::string_view text, std::size_t template_index) const;
    std::size_t template_count() const noexcept { return templates_.size(); }
    bool contains_phrase(std::string_view text, std::string_view phrase) const;

private:
    std::string mask(std::string_view text, const std::vector<SlotValue>& slots) const;

    LexiconConfig config_;
    std::vector<std::regex> slot_regexes_;
    std::vector<std::regex> templates_;
};

// True when `phrase` occurs in `text` at alphanumeric word boundaries, ignoring case.
bool contains_phrase_ci(std::string_view text, std::string_view phrase);

}  // namespace semcache
