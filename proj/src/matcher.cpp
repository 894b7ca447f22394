#include "semcache/matcher.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "semcache/text.hpp"

namespace semcache {

std::string to_string(MatchMode m) {
    switch (m) {
        case MatchMode::Return: return "return";
        case MatchMode::Guide: return "guide";
        case MatchMode::Generate: return "generate";
    }
    return "generate";
}

MatchMode mode_from_string(std::string_view s) {
    const auto t = text::normalize_token(s);
    if (t == "return") return MatchMode::Return;
    if (t == "guide") return MatchMode::Guide;
    if (t == "generate") return MatchMode::Generate;
    throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

void Thresholds::validate() const {
    if (!(theta_guide > 0.0 && theta_guide < theta_return && theta_return <= 1.0))
        throw std::invalid_argument(
            fmt::format("thresholds must satisfy 0 < theta_guide < theta_return <= 1 (got {}, {})", theta_guide,
                        theta_return));
}

void to_json(nlohmann::json& j, const AdaptationHint& h) {
    j = nlohmann::json{{"field", h.field}, {"reference_value", h.reference_value}, {"current_value", h.current_value}};
}

void from_json(const nlohmann::json& j, AdaptationHint& h) {
    h.field = j.at("field").get<std::string>();
    h.reference_value = j.at("reference_value").get<std::string>();
    h.current_value = j.at("current_value").get<std::string>();
}

void to_json(nlohmann::json& j, const EquivalenceVerdict& v) {
    j = nlohmann::json{{"matched", v.matched}};
    j["matched_index"] = v.matched_index ? nlohmann::json(*v.matched_index) : nlohmann::json(nullptr);
    j["adaptations"] = v.adaptations;
    if (v.confidence) j["confidence"] = *v.confidence;
}

void from_json(const nlohmann::json& j, EquivalenceVerdict& v) {
    v = EquivalenceVerdict{};
    v.matched = j.at("matched").get<bool>();
    if (j.contains("matched_index") && !j.at("matched_index").is_null())
        v.matched_index = j.at("matched_index").get<std::size_t>();
    v.adaptations = j.value("adaptations", std::vector<AdaptationHint>{});
    if (j.contains("confidence") && !j.at("confidence").is_null()) v.confidence = j.at("confidence").get<double>();
}

nlohmann::json decision_to_json(const MatchDecision& d) {
    nlohmann::json j{{"mode", to_string(d.mode)},
                     {"s_base", d.s_base},
                     {"s_adj", d.s_adj},
                     {"structural", d.structural},
                     {"adaptations", d.adaptations}};
    j["candidate"] = d.candidate ? entry_to_json(*d.candidate) : nlohmann::json(nullptr);
    j["guidance"] = d.guidance ? nlohmann::json(*d.guidance) : nlohmann::json(nullptr);
    return j;
}

MatchDecision decision_from_json(const nlohmann::json& j) {
    MatchDecision d;
    d.mode = mode_from_string(j.at("mode").get<std::string>());
    d.s_base = j.at("s_base").get<double>();
    d.s_adj = j.at("s_adj").get<double>();
    d.structural = j.value("structural", 0.0);
    d.adaptations = j.value("adaptations", std::vector<AdaptationHint>{});
    if (j.contains("candidate") && !j.at("candidate").is_null()) d.candidate = entry_from_json(j.at("candidate"));
    if (j.contains("guidance") && !j.at("guidance").is_null()) d.guidance = j.at("guidance").get<std::string>();
    return d;
}

BoostBreakdown compute_boost(std::string_view a, std::string_view b, const DomainLexicon& lexicon) {
    const auto& inc = lexicon.config().increments;
    BoostBreakdown out;

    if (!lexicon.extract_locations(a).empty() && !lexicon.extract_locations(b).empty() &&
        lexicon.mask_locations(a) == lexicon.mask_locations(b))
        out.location_norm = inc.location_norm;

    const auto ga = lexicon.synonym_groups_present(a);
    const auto gb = lexicon.synonym_groups_present(b);
    for (auto g : ga) {
        if (std::find(gb.begin(), gb.end(), g) != gb.end()) {
            out.category_variation = inc.category_variation;
            break;
        }
    }

    for (std::size_t t = 0; t < lexicon.template_count(); ++t) {
        if (lexicon.matches_template(a, t) && lexicon.matches_template(b, t)) {
            out.structural_pattern = inc.structural_pattern;
            break;
        }
    }

    for (const auto& phrase : lexicon.config().key_phrases) {
        if (lexicon.contains_phrase(a, phrase) && lexicon.contains_phrase(b, phrase)) {
            out.key_phrase = inc.key_phrase;
            break;
        }
    }
    return out;
}

double adjusted_similarity(double s_base, const BoostBreakdown& boost) {
    return std::min(kAdjustedCap, s_base + boost.total());
}

MatchMode decide(double s_base, double s_adj, const Thresholds& t) {
    if (s_base >= t.theta_return) return MatchMode::Return;
    if (s_adj >= t.theta_guide) return MatchMode::Guide;
    return MatchMode::Generate;
}

std::vector<AdaptationHint> diff_slots(std::string_view reference, std::string_view current,
                                       const DomainLexicon& lexicon) {
    const auto ref_slots = lexicon.extract_slots(reference);
    const auto cur_slots = lexicon.extract_slots(current);

    std::vector<std::string> field_order;
    std::map<std::string, std::vector<std::string>> ref_by_field;
    std::map<std::string, std::vector<std::string>> cur_by_field;
    for (const auto& s : ref_slots) {
        if (!ref_by_field.count(s.field)) field_order.push_back(s.field);
        ref_by_field[s.field].push_back(s.value);
    }
    for (const auto& s : cur_slots) cur_by_field[s.field].push_back(s.value);

    std::vector<AdaptationHint> out;
    for (const auto& field : field_order) {
        const auto& refs = ref_by_field[field];
        const auto& curs = cur_by_field[field];
        for (std::size_t i = 0; i < std::min(refs.size(), curs.size()); ++i) {
            if (text::to_lower(refs[i]) != text::to_lower(curs[i])) out.push_back({field, refs[i], curs[i]});
        }
    }
    return out;
}

EquivalenceVerdict MockEquivalenceOracle::evaluate(std::string_view query, const QuerySignature& signature,
                                                   std::span<const CacheEntry> candidates) const {
    const auto masked = lexicon_.mask_slots(query);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].signature == signature && lexicon_.mask_slots(candidates[i].question) == masked)
            return EquivalenceVerdict{true, i, {}, 1.0};
    }
    const auto key = build_similarity_key(signature);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].similarity_key == key)
            return EquivalenceVerdict{false, i, diff_slots(candidates[i].question, query, lexicon_), 0.95};
    }
    return EquivalenceVerdict{};
}

namespace {
bool verdict_consistent(const EquivalenceVerdict& v, std::size_t n) {
    if (v.matched_index && *v.matched_index >= n) return false;
    if (v.matched && (!v.matched_index || !v.adaptations.empty())) return false;
    if (!v.matched && !v.adaptations.empty() && !v.matched_index) return false;
    if (v.confidence && !(*v.confidence >= 0.0 && *v.confidence <= 1.0)) return false;
    for (const auto& h : v.adaptations) {
        if (h.field.empty() || h.reference_value == h.current_value) return false;
    }
    return true;
}
}  // namespace

EquivalenceVerdict check_equivalence(const EquivalenceOracle& oracle, std::string_view query,
                                     const QuerySignature& signature, std::span<const CacheEntry> candidates) {
    if (candidates.empty()) throw std::invalid_argument("check_equivalence needs at least one candidate");
    try {
        auto v = oracle.evaluate(query, signature, candidates);
        if (verdict_consistent(v, candidates.size())) return v;
    } catch (const std::exception&) {
        // fall through: never fabricate a match
    }
    return EquivalenceVerdict{};
}

std::string format_guidance(const CacheEntry& entry, const std::vector<AdaptationHint>& adaptations,
                            double similarity) {
    std::string out = "=== REFERENCE GUIDANCE ===\n";
    out += fmt::format("Similar question found (similarity: {:.2f})\n", similarity);
    out += "\n";
    if (!adaptations.empty()) {
        out += "Required Adaptations:\n";
        for (const auto& h : adaptations) out += fmt::format("- {}: {} -> {}\n", h.field, h.reference_value, h.current_value);
        out += "\n";
    }
    out += "Reference Plan:\n";
    for (std::size_t i = 0; i < entry.plan.size(); ++i) {
        std::string step = entry.plan[i];
        for (const auto& h : adaptations) text::replace_all(step, h.reference_value, "[" + h.field + "]");
        out += fmt::format("{}. {}\n", i + 1, step);
    }
    return out;
}

ParsedGuidance parse_guidance(std::string_view guidance) {
    auto lines = text::split(guidance, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    auto fail = [](const std::string& why) -> ParsedGuidance { throw std::invalid_argument("bad guidance: " + why); };

    std::size_t i = 0;
    if (lines.size() < 4 || lines[0] != "=== REFERENCE GUIDANCE ===") return fail("missing header");
    static constexpr std::string_view kSim = "Similar question found (similarity: ";
    if (lines[1].rfind(kSim, 0) != 0 || lines[1].back() != ')') return fail("missing similarity line");
    ParsedGuidance out;
    out.similarity = lines[1].substr(kSim.size(), lines[1].size() - kSim.size() - 1);
    if (!lines[2].empty()) return fail("expected blank line after similarity");
    i = 3;
    if (lines[i] == "Required Adaptations:") {
        ++i;
        while (i < lines.size() && lines[i].rfind("- ", 0) == 0) {
            const auto& l = lines[i];
            const auto colon = l.find(": ", 2);
            const auto arrow = l.find(" -> ", colon == std::string::npos ? 2 : colon);
            if (colon == std::string::npos || arrow == std::string::npos) return fail("bad adaptation line");
            out.adaptations.push_back(
                {l.substr(2, colon - 2), l.substr(colon + 2, arrow - colon - 2), l.substr(arrow + 4)});
            ++i;
        }
        if (out.adaptations.empty()) return fail("empty adaptations section");
        if (i >= lines.size() || !lines[i].empty()) return fail("expected blank line after adaptations");
        ++i;
    }
    if (i >= lines.size() || lines[i] != "Reference Plan:") return fail("missing plan section");
    ++i;
    for (std::size_t n = 1; i < lines.size(); ++i, ++n) {
        const auto prefix = std::to_string(n) + ". ";
        if (lines[i].rfind(prefix, 0) != 0) return fail("bad plan step numbering");
        out.plan.push_back(lines[i].substr(prefix.size()));
    }
    return out;
}

ReferenceMatcher::ReferenceMatcher(const CacheStore& store, const Embedder& embedder, const DomainLexicon& lexicon,
                                   const EquivalenceOracle& oracle, MatchConfig config)
    : store_(store), embedder_(embedder), lexicon_(lexicon), oracle_(oracle), config_(config) {
    config_.thresholds.validate();
    config_.weights.validate();
    if (config_.k == 0) throw std::invalid_argument("k must be >= 1");
}

MatchDecision ReferenceMatcher::match(std::string_view query, const QuerySignature& signature) const {
    MatchDecision d;
    const auto hits = store_.top_k(embedder_.embed(query), config_.k);
    if (hits.empty()) return d;

    struct Scored {
        const ScoredEntry* hit;
        double s_base;
        double s_adj;
    };
    std::vector<Scored> scored;
    for (const auto& h : hits) {
        const double base = std::clamp(h.s_base, 0.0, 1.0);
        scored.push_back({&h, base, adjusted_similarity(base, compute_boost(query, h.entry.question, lexicon_))});
    }

    auto fill = [&](const Scored& s, MatchMode mode) {
        d.mode = mode;
        d.s_base = s.s_base;
        d.s_adj = s.s_adj;
        d.structural = structural_similarity(signature, s.hit->entry.signature, config_.weights);
        if (mode != MatchMode::Generate) d.candidate = s.hit->entry;
    };

    // Return is decided on the raw score of the nearest entry.
    if (decide(scored.front().s_base, scored.front().s_adj, config_.thresholds) == MatchMode::Return) {
        fill(scored.front(), MatchMode::Return);
        return d;
    }

    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.s_adj > b.s_adj; });
    const auto mode = decide(scored.front().s_base, scored.front().s_adj, config_.thresholds);
    if (mode == MatchMode::Generate) {
        fill(scored.front(), MatchMode::Generate);
        return d;
    }

    std::vector<CacheEntry> guide_candidates;
    std::vector<const Scored*> guide_scores;
    for (const auto& s : scored) {
        if (s.s_adj < config_.thresholds.theta_guide) break;
        guide_candidates.push_back(s.hit->entry);
        guide_scores.push_back(&s);
    }
    const auto verdict = check_equivalence(oracle_, query, signature, guide_candidates);
    const std::size_t chosen = verdict.matched_index.value_or(0);
    fill(*guide_scores[chosen], MatchMode::Guide);
    d.adaptations = verdict.adaptations;
    d.guidance = format_guidance(*d.candidate, d.adaptations, d.s_adj);
    return d;
}

}  // namespace semcache
