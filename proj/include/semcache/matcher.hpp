#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "semcache/cache_store.hpp"
#include "semcache/embedding.hpp"
#include "semcache/lexicon.hpp"
#include "semcache/signature.hpp"

namespace semcache {

enum class MatchMode { Return, Guide, Generate };

std::string to_string(MatchMode m);
MatchMode mode_from_string(std::string_view s);

struct Thresholds {
    double theta_return = 0.995;
    double theta_guide = 0.50;

    // Throws std::invalid_argument unless 0 < theta_guide < theta_return <= 1.
    void validate() const;
};

struct BoostBreakdown {
    double location_norm = 0.0;
    double category_variation = 0.0;
    double structural_pattern = 0.0;
    double key_phrase = 0.0;

    double total() const { return location_norm + category_variation + structural_pattern + key_phrase; }
};

struct AdaptationHint {
    std::string field;
    std::string reference_value;
    std::string current_value;

    friend bool operator==(const AdaptationHint&, const AdaptationHint&) = default;
};

struct EquivalenceVerdict {
    bool matched = false;
    std::optional<std::size_t> matched_index;
    std::vector<AdaptationHint> adaptations;
    std::optional<double> confidence;

    friend bool operator==(const EquivalenceVerdict&, const EquivalenceVerdict&) = default;
};

void to_json(nlohmann::json& j, const AdaptationHint& h);
void from_json(const nlohmann::json& j, AdaptationHint& h);
void to_json(nlohmann::json& j, const EquivalenceVerdict& v);
void from_json(const nlohmann::json& j, EquivalenceVerdict& v);

struct MatchDecision {
    MatchMode mode = MatchMode::Generate;
    std::optional<CacheEntry> candidate;
    double s_base = 0.0;
    double s_adj = 0.0;
    double structural = 0.0;
    std::vector<AdaptationHint> adaptations;
    std::optional<std::string> guidance;
};

nlohmann::json decision_to_json(const MatchDecision& d);
MatchDecision decision_from_json(const nlohmann::json& j);

// ---- scoring ----------------------------------------------------------------

BoostBreakdown compute_boost(std::string_view query_a, std::string_view query_b, const DomainLexicon& lexicon);

// min(0.99, s_base + boost.total())
double adjusted_similarity(double s_base, const BoostBreakdown& boost);
inline constexpr double kAdjustedCap = 0.99;

// Return iff s_base >= theta_return; else Guide iff s_adj >= theta_guide; else Generate.
MatchMode decide(double s_base, double s_adj, const Thresholds& t);

// ---- equivalence ------------------------------------------------------------

/// Decides whether a query is equivalent to one of the ranked candidates and,
/// if not, which value substitutions would make a candidate reusable.
/// Implementations must tolerate concurrent calls.
class EquivalenceOracle {
public:
    virtual ~EquivalenceOracle() = default;
    virtual EquivalenceVerdict evaluate(std::string_view query, const QuerySignature& signature,
                                        std::span<const CacheEntry> candidates) const = 0;
};

/// Rule-based stand-in for the LLM check. Equivalent when the slot-masked
/// texts and signatures agree; otherwise the first candidate with an equal
/// similarity key yields one hint per differing slot value.
class MockEquivalenceOracle final : public EquivalenceOracle {
public:
    explicit MockEquivalenceOracle(const DomainLexicon& lexicon) : lexicon_(lexicon) {}
    EquivalenceVerdict evaluate(std::string_view query, const QuerySignature& signature,
                                std::span<const CacheEntry> candidates) const override;

private:
    const DomainLexicon& lexicon_;
};

// Pairs slot values of the same field by occurrence order; unequal pairs become hints.
std::vector<AdaptationHint> diff_slots(std::string_view reference, std::string_view current,
                                       const DomainLexicon& lexicon);

// Throws std::invalid_argument on empty candidates. An oracle that throws or
// returns an inconsistent verdict degrades to {matched=false, no adaptations}.
EquivalenceVerdict check_equivalence(const EquivalenceOracle& oracle, std::string_view query,
                                     const QuerySignature& signature, std::span<const CacheEntry> candidates);

// ---- guidance ---------------------------------------------------------------

std::string format_guidance(const CacheEntry& entry, const std::vector<AdaptationHint>& adaptations,
                            double similarity);

struct ParsedGuidance {
    std::string similarity;  // as printed, e.g. "0.89"
    std::vector<AdaptationHint> adaptations;
    std::vector<std::string> plan;
};

// Inverse of format_guidance. Throws std::invalid_argument on malformed text.
ParsedGuidance parse_guidance(std::string_view guidance);

// ---- reference matching -----------------------------------------------------

struct MatchConfig {
    Thresholds thresholds;
    std::size_t k = 5;
    SimilarityWeights weights;
};

/// Top-k lookup, boost adjustment, dual-threshold routing, and equivalence
/// refinement for Guide-mode candidates. Holds references only; all
/// referenced objects must outlive it.
class ReferenceMatcher {
public:
    ReferenceMatcher(const CacheStore& store, const Embedder& embedder, const DomainLexicon& lexicon,
                     const EquivalenceOracle& oracle, MatchConfig config = {});

    MatchDecision match(std::string_view query, const QuerySignature& signature) const;

    const MatchConfig& config() const noexcept { return config_; }

private:
    const CacheStore& store_;
    const Embedder& embedder_;
    const DomainLexicon& lexicon_;
    const EquivalenceOracle& oracle_;
    MatchConfig config_;
};

}  // namespace semcache
