#include <doctest.h>

#include <cmath>
#include <random>

#include "semcache/embedding.hpp"
#include "semcache/lexicon.hpp"
#include "semcache/schema.hpp"
#include "semcache/text.hpp"

using namespace semcache;

TEST_CASE("normalization helpers") {
    CHECK(text::normalize_token("  Analytical   Sum ") == "analytical_sum");
    CHECK(text::normalize_table(" inventory_master") == "INVENTORY_MASTER");
    CHECK(text::normalize_question("  What IS\tthe  value? ") == "what is the value?");
    CHECK(text::words("Stock of ITEM-001-BB0 at Plant-A.") ==
          std::vector<std::string>{"stock", "of", "item-001-bb0", "at", "plant-a"});
    CHECK(text::utf8_length("caf\xc3\xa9") == 4);
}

TEST_CASE("sha256 matches a known digest") {
    CHECK(text::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("InputError prefixes the line number") {
    InputError e("bad record", 7);
    CHECK(std::string(e.what()) == "line 7: bad record");
    CHECK(e.line() == 7);
}

TEST_CASE("embedding vectors reject bad input") {
    CHECK_THROWS_AS(EmbeddingVector(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(EmbeddingVector({1.0, NAN}), std::invalid_argument);
    CHECK_THROWS_AS(EmbeddingVector({0.0, 0.0}).normalized(), std::invalid_argument);
    CHECK_THROWS_AS(cosine_similarity(EmbeddingVector({1.0}), EmbeddingVector({1.0, 0.0})), std::invalid_argument);
}

TEST_CASE("cosine similarity agrees with a direct computation") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> a(16), b(16);
        for (auto& x : a) x = d(rng);
        for (auto& x : b) x = d(rng);
        double dot = 0, na = 0, nb = 0;
        for (int i = 0; i < 16; ++i) {
            dot += a[i] * b[i];
            na += a[i] * a[i];
            nb += b[i] * b[i];
        }
        CHECK(cosine_similarity(EmbeddingVector(a), EmbeddingVector(b)) ==
              doctest::Approx(dot / std::sqrt(na * nb)).epsilon(1e-12));
    }
}

TEST_CASE("hash embedder is deterministic and case-insensitive") {
    HashEmbedder e(64);
    CHECK(e.embed("Stock value at Plant-A") == e.embed("stock  VALUE at plant-a"));
    CHECK(cosine_similarity(e.embed("stock value"), e.embed("stock value")) == doctest::Approx(1.0));
    CHECK(cosine_similarity(e.embed("stock value at plant"), e.embed("stock value at plant now")) > 0.8);
    CHECK_THROWS_AS(e.embed("?!"), std::invalid_argument);
}

TEST_CASE("fixture embedder overrides by normalized question") {
    auto fallback = std::make_shared<HashEmbedder>(4);
    FixtureEmbedder e(fallback, {{"hello world", EmbeddingVector({1.0, 0.0, 0.0, 0.0})}});
    CHECK(e.embed("  Hello   World ") == EmbeddingVector({1.0, 0.0, 0.0, 0.0}));
    CHECK(e.embed("other text") == fallback->embed("other text"));
}

TEST_CASE("lexicon extracts slots in text order") {
    DomainLexicon lex;
    auto slots = lex.extract_slots("What is the total stock value for item code ITEM-001-BB0 at Plant-A?");
    REQUIRE(slots.size() == 2);
    CHECK(slots[0].field == "item_code");
    CHECK(slots[0].value == "ITEM-001-BB0");
    CHECK(slots[1].field == "organization");
    CHECK(slots[1].value == "Plant-A");
    CHECK(lex.mask_locations("Stock at Plant-A") == lex.mask_locations("stock at plant-b"));
    CHECK(lex.mask_slots("Value of ITEM-001-AA0 at Plant-A") == lex.mask_slots("value of ITEM-002-ZZ9 at Plant-C"));
}

TEST_CASE("phrase matching respects word boundaries") {
    CHECK(contains_phrase_ci("Total Stock Value for X", "stock value"));
    CHECK_FALSE(contains_phrase_ci("overstock values", "stock value"));
}

TEST_CASE("lexicon config survives json") {
    const auto c = default_lexicon_config();
    nlohmann::json j = c;
    const auto back = j.get<LexiconConfig>();
    CHECK(nlohmann::json(back) == j);
}

TEST_CASE("schema hash ignores descriptions and column order") {
    SchemaCatalog a({{"T1", TableInfo{{"A", "B"}, "first", ""}}, {"T2", TableInfo{{"C"}, "", ""}}});
    SchemaCatalog b({{"T2", TableInfo{{"C"}, "other", "rows"}}, {"T1", TableInfo{{"B", "A"}, "", ""}}});
    SchemaCatalog c({{"T1", TableInfo{{"A", "B", "D"}, "", ""}}, {"T2", TableInfo{{"C"}, "", ""}}});
    CHECK(a.schema_hash() == b.schema_hash());
    CHECK(a.schema_hash() != c.schema_hash());
    CHECK(SchemaCatalog::from_json(a.to_json()).schema_hash() == a.schema_hash());
}
