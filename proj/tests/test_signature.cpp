#include <doctest.h>

#include <algorithm>
#include <iterator>
#include <random>

#include "semcache/signature.hpp"
#include "semcache/text.hpp"
#include "support.hpp"

using namespace semcache;
using semcache::testing::make_sig;

namespace {

// Independent reference: plain loops over raw strings.
double oracle_jaccard(std::vector<std::string> a, std::vector<std::string> b) {
    for (auto* v : {&a, &b}) {
        for (auto& s : *v) std::transform(s.begin(), s.end(), s.begin(), ::toupper);
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    if (a.empty() && b.empty()) return 1.0;
    std::vector<std::string> inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    return static_cast<double>(inter.size()) / static_cast<double>(a.size() + b.size() - inter.size());
}

}  // namespace

TEST_CASE("worked example similarity key") {
    auto sig = make_sig("valuation", "analytical", "sum", "value", "item", {"location", "item_code"},
                        "inventory_master");
    CHECK(build_similarity_key(sig) == "valuation|analytical_sum|value_item|item_code+location|INVENTORY_MASTER");
}

TEST_CASE("key lists joins after the primary table") {
    auto sig = make_sig("stock", "lookup", "none", "quantity", "none", {}, "STOCK_ON_HAND", {"inventory_master"});
    CHECK(build_similarity_key(sig) == "stock|lookup_none|quantity_none||STOCK_ON_HAND+INVENTORY_MASTER");
}

TEST_CASE("signature rejects broken invariants") {
    CHECK_THROWS_AS(make_sig("", "lookup", "none", "m", "none", {}, "T"), std::invalid_argument);
    CHECK_THROWS_AS(make_sig("c", "lookup", "none", "m", "none", {}, ""), std::invalid_argument);
    CHECK_THROWS_AS(make_sig("c", "lookup", "none", "m", "none", {}, "T", {"t"}), std::invalid_argument);
    CHECK_THROWS_AS(make_sig("c", "lookup", "none", "m", "none", {}, "T", {"A", "a"}), std::invalid_argument);
}

TEST_CASE("default weights sum to one") {
    SimilarityWeights w;
    CHECK(w.sum() == 1.0);
    CHECK_NOTHROW(w.validate());
    w.flags = 0.2;
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
}

TEST_CASE("identical signatures score one; disjoint ones zero") {
    auto a = make_sig("valuation", "analytical", "sum", "value", "item", {"item_code"}, "IM", {}, {"currency"});
    auto b = make_sig("aging", "trend", "avg", "qty", "slab", {}, "AG", {"X"}, {"monthly"});
    CHECK(structural_similarity(a, a) == 1.0);
    CHECK(structural_similarity(a, b) == 0.0);
}

TEST_CASE("filter values do not enter structural similarity") {
    auto a = make_sig("valuation", "analytical", "sum", "value", "item", {"item_code"}, "IM");
    auto b = make_sig("valuation", "analytical", "sum", "value", "item", {"location", "date"}, "IM");
    CHECK(structural_similarity(a, b) == 1.0);
}

TEST_CASE("jaccard matches a set-algebra oracle") {
    std::mt19937 rng(5);
    const std::vector<std::string> pool{"a", "b", "c", "d", "e"};
    for (int t = 0; t < 500; ++t) {
        std::vector<std::string> x, y;
        for (const auto& p : pool) {
            if (rng() % 2) x.push_back(p);
            if (rng() % 2) y.push_back(p);
        }
        std::set<std::string> sx, sy;
        for (const auto& s : x) sx.insert(text::to_upper(s));
        for (const auto& s : y) sy.insert(text::to_upper(s));
        CHECK(jaccard(sx, sy) == doctest::Approx(oracle_jaccard(x, y)).epsilon(1e-15));
    }
}

TEST_CASE("structural similarity is symmetric and bounded") {
    std::mt19937 rng(9);
    auto pick = [&](std::vector<std::string> v) { return v[rng() % v.size()]; };
    auto random_sig = [&] {
        std::vector<std::string> joins, flags;
        for (auto t : {"J1", "J2", "J3"})
            if (rng() % 2) joins.push_back(t);
        for (auto f : {"currency", "monthly", "top_n"})
            if (rng() % 2) flags.push_back(f);
        return make_sig(pick({"stock", "valuation"}), pick({"lookup", "analytical"}), pick({"none", "sum"}),
                        pick({"value", "quantity"}), pick({"none", "item"}), {}, pick({"P1", "P2"}), joins, flags);
    };
    for (int t = 0; t < 2000; ++t) {
        auto a = random_sig();
        auto b = random_sig();
        const double s = structural_similarity(a, b);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        CHECK(s == structural_similarity(b, a));
    }
}

TEST_CASE("signature json round trip") {
    auto sig = make_sig("procurement", "analytical", "count", "count", "supplier", {"item_code", "location"},
                        "PURCHASE_ORDERS", {"PO_LINES", "SUPPLIERS"}, {"open_only"});
    nlohmann::json j = sig;
    CHECK(signature_from_json(j) == sig);
    CHECK(QuerySignature(sig.fields()) == sig);
}
