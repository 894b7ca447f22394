#include <doctest.h>

#include <stdexcept>

#include "semcache/matcher.hpp"
#include "support.hpp"

using namespace semcache;
using namespace semcache::testing;

namespace {

struct ThrowingOracle final : EquivalenceOracle {
    EquivalenceVerdict evaluate(std::string_view, const QuerySignature&, std::span<const CacheEntry>) const override {
        throw std::runtime_error("model unavailable");
    }
};

struct FixedOracle final : EquivalenceOracle {
    EquivalenceVerdict verdict;
    EquivalenceVerdict evaluate(std::string_view, const QuerySignature&, std::span<const CacheEntry>) const override {
        return verdict;
    }
};

struct WorkedExample {
    DomainLexicon lexicon;
    std::shared_ptr<HashEmbedder> fallback = std::make_shared<HashEmbedder>(8);
    FixtureEmbedder embedder{fallback,
                             {{text::normalize_question(kReferenceQuestion), unit(8, 0)},
                              {text::normalize_question(kCurrentQuestion), at_cosine(8, 0.89)}}};
    CacheStore store{8};
    MockEquivalenceOracle oracle{lexicon};
    MockIntentClassifier classifier{lexicon};

    WorkedExample() { store.insert(reference_entry(lexicon, unit(8, 0))); }
};

}  // namespace

TEST_CASE("decide boundaries") {
    Thresholds t;
    CHECK(decide(0.995, 0.99, t) == MatchMode::Return);
    CHECK(decide(0.40, 0.50, t) == MatchMode::Guide);
    CHECK(decide(0.40, 0.4999, t) == MatchMode::Generate);
    CHECK(decide(0.9949, 0.99, t) == MatchMode::Guide);
}

TEST_CASE("thresholds validate ordering") {
    CHECK_THROWS_AS((Thresholds{0.5, 0.6}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((Thresholds{1.1, 0.5}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((Thresholds{0.9, 0.0}.validate()), std::invalid_argument);
    CHECK_NOTHROW(Thresholds{}.validate());
}

TEST_CASE("adjusted similarity is capped") {
    BoostBreakdown b{0.02, 0.02, 0.02, 0.02};
    CHECK(adjusted_similarity(0.5, b) == doctest::Approx(0.58));
    CHECK(adjusted_similarity(0.98, b) == kAdjustedCap);
    CHECK(adjusted_similarity(0.999, BoostBreakdown{}) == kAdjustedCap);
}

TEST_CASE("boost sources fire independently") {
    DomainLexicon lex;
    auto b = compute_boost("Stock value at Plant-A", "stock value at Plant-B", lex);
    CHECK(b.location_norm == 0.02);
    auto none = compute_boost("vendors shipped late", "forecast demand spikes", lex);
    CHECK(none.total() == 0.0);
    auto worked = compute_boost(kReferenceQuestion, kCurrentQuestion, lex);
    CHECK(worked.location_norm == 0.0);
    CHECK(worked.key_phrase == 0.02);
    CHECK(worked.total() <= 0.08 + 1e-12);
}

TEST_CASE("diff_slots pairs values by field and order") {
    DomainLexicon lex;
    auto hints = diff_slots(kReferenceQuestion, kCurrentQuestion, lex);
    REQUIRE(hints.size() == 2);
    CHECK(hints[0] == AdaptationHint{"item_code", "ITEM-001-BB0", "ITEM-001-NN0"});
    CHECK(hints[1] == AdaptationHint{"organization", "Plant-A", "Plant-B"});
    CHECK(diff_slots("stock at Plant-A", "STOCK AT plant-a", lex).empty());
}

TEST_CASE("guidance matches the golden block and parses back") {
    DomainLexicon lex;
    auto entry = reference_entry(lex, unit(4, 0));
    auto hints = diff_slots(kReferenceQuestion, kCurrentQuestion, lex);
    const auto text = format_guidance(entry, hints, 0.89);
    CHECK(text == read_file(fixture_path("worked_example_guidance.txt")));

    const auto parsed = parse_guidance(text);
    CHECK(parsed.similarity == "0.89");
    CHECK(parsed.adaptations == hints);
    REQUIRE(parsed.plan.size() == 5);
    CHECK(parsed.plan[1] == "Filter by ITEM_CODE = '[item_code]'");
    CHECK_THROWS_AS(parse_guidance("not guidance"), std::invalid_argument);
}

TEST_CASE("guidance without adaptations omits the section") {
    DomainLexicon lex;
    auto entry = reference_entry(lex, unit(4, 0));
    const auto text = format_guidance(entry, {}, 0.7);
    CHECK(text.find("Required Adaptations") == std::string::npos);
    CHECK(parse_guidance(text).plan == entry.plan);
}

TEST_CASE("check_equivalence degrades on oracle failure") {
    DomainLexicon lex;
    std::vector<CacheEntry> cands{reference_entry(lex, unit(4, 0))};
    const auto& sig = cands[0].signature;
    CHECK(check_equivalence(ThrowingOracle{}, kCurrentQuestion, sig, cands) == EquivalenceVerdict{});

    FixedOracle bad;
    bad.verdict.matched = true;
    bad.verdict.matched_index = 3;
    CHECK(check_equivalence(bad, kCurrentQuestion, sig, cands) == EquivalenceVerdict{});
    CHECK_THROWS_AS(check_equivalence(bad, kCurrentQuestion, sig, {}), std::invalid_argument);
}

TEST_CASE("mock oracle: same masked text is equivalent") {
    DomainLexicon lex;
    MockEquivalenceOracle oracle(lex);
    std::vector<CacheEntry> cands{reference_entry(lex, unit(4, 0))};
    auto v = oracle.evaluate("What is the total stock value for item code ITEM-007-QQ1 at Plant-C?",
                             cands[0].signature, cands);
    CHECK(v.matched);
    CHECK(v.matched_index == std::optional<std::size_t>(0));
}

TEST_CASE("worked example routes to Guide with two adaptations") {
    WorkedExample w;
    ReferenceMatcher matcher(w.store, w.embedder, w.lexicon, w.oracle);
    const auto sig = w.classifier.classify(kCurrentQuestion).signature;
    const auto d = matcher.match(kCurrentQuestion, sig);
    CHECK(d.mode == MatchMode::Guide);
    CHECK(d.s_base == doctest::Approx(0.89).epsilon(1e-12));
    CHECK(d.s_adj > d.s_base);
    REQUIRE(d.candidate);
    CHECK(d.candidate->question == kReferenceQuestion);
    CHECK(d.adaptations == diff_slots(kReferenceQuestion, kCurrentQuestion, w.lexicon));
    REQUIRE(d.guidance);
    CHECK(*d.guidance == format_guidance(*d.candidate, d.adaptations, d.s_adj));
    CHECK(d.structural == 1.0);
}

TEST_CASE("exact repeat routes to Return; empty store to Generate") {
    WorkedExample w;
    ReferenceMatcher matcher(w.store, w.embedder, w.lexicon, w.oracle);
    const auto sig = w.classifier.classify(kReferenceQuestion).signature;
    CHECK(matcher.match(kReferenceQuestion, sig).mode == MatchMode::Return);

    CacheStore empty(8);
    ReferenceMatcher none(empty, w.embedder, w.lexicon, w.oracle);
    const auto d = none.match(kReferenceQuestion, sig);
    CHECK(d.mode == MatchMode::Generate);
    CHECK_FALSE(d.candidate);
}

TEST_CASE("decision json round trip") {
    WorkedExample w;
    ReferenceMatcher matcher(w.store, w.embedder, w.lexicon, w.oracle);
    const auto d = matcher.match(kCurrentQuestion, w.classifier.classify(kCurrentQuestion).signature);
    const auto j = decision_to_json(d);
    CHECK(decision_to_json(decision_from_json(j)) == j);
}
