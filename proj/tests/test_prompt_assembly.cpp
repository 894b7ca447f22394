#include <doctest.h>

#include <random>
#include <sstream>

#include "semcache/prompt_assembly.hpp"
#include "semcache/synthetic.hpp"
#include "semcache/text.hpp"

using namespace semcache;

namespace {

PromptFragment frag(std::string id, std::set<std::string> tables, int priority = 0, std::string body = "text") {
    PromptFragment f;
    f.id = std::move(id);
    f.text = std::move(body);
    f.global = tables.empty();
    f.tables = std::move(tables);
    f.priority = priority;
    return f;
}

}  // namespace

TEST_CASE("estimate_tokens rounds code points up to quarters") {
    CHECK(estimate_tokens("") == 0);
    CHECK(estimate_tokens("abc") == 1);
    CHECK(estimate_tokens("abcd") == 1);
    CHECK(estimate_tokens("abcde") == 2);
    CHECK(estimate_tokens("\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9") == 1);
}

TEST_CASE("reduction report arithmetic") {
    auto r = ReductionReport::from_counts(200, 50);
    CHECK(r.reduction_pct == doctest::Approx(0.75));
    r += ReductionReport::from_counts(100, 100);
    CHECK(r.full_tokens == 300);
    CHECK(r.filtered_tokens == 150);
    CHECK(r.reduction_pct == doctest::Approx(0.5));
    CHECK(ReductionReport::from_counts(0, 0).reduction_pct == 0.0);
}

TEST_CASE("repository validation") {
    CHECK_THROWS_AS(PromptRepository({frag("a", {}), frag("a", {"T"})}), InputError);
    CHECK_THROWS_AS(PromptRepository({frag("a", {}, 0, "  ")}), InputError);
    auto g = frag("g", {"T"});
    g.global = true;
    CHECK_THROWS_AS(PromptRepository({g}), InputError);
    CHECK_THROWS_AS(PromptRepository({frag("a", {"T"})}, {"OTHER"}), InputError);
}

TEST_CASE("filter includes globals and intersecting tags in priority order") {
    PromptRepository repo({frag("z-global", {}, 0), frag("a-inv", {"INV"}, 2), frag("b-po", {"PO"}, 1),
                           frag("c-both", {"INV", "PO"}, 1)});
    auto ids = [](const std::vector<PromptFragment>& v) {
        std::vector<std::string> out;
        for (const auto& f : v) out.push_back(f.id);
        return out;
    };
    CHECK(ids(repo.filter_by_tables(Audience::Planner, {"INV"})) == std::vector<std::string>{"z-global", "c-both", "a-inv"});
    CHECK(ids(repo.filter_by_tables(Audience::Planner, {})) == std::vector<std::string>{"z-global"});
    CHECK(repo.filter_by_tables(Audience::Codegen, {"INV"}).empty());
    CHECK_THROWS_WITH_AS(repo.filter_by_tables(Audience::Planner, {"INV", "NOPE"}), doctest::Contains("NOPE"),
                         std::invalid_argument);
}

TEST_CASE("filter agrees with a naive scan on random repositories") {
    std::mt19937 rng(41);
    const std::vector<std::string> tables{"A", "B", "C", "D", "E"};
    for (int round = 0; round < 50; ++round) {
        std::vector<PromptFragment> frags;
        for (int i = 0; i < 30; ++i) {
            std::set<std::string> tags;
            if (rng() % 4 != 0)
                for (const auto& t : tables)
                    if (rng() % 3 == 0) tags.insert(t);
            auto f = frag("f" + std::to_string(i), tags, static_cast<int>(rng() % 5));
            f.audience = rng() % 2 ? Audience::Planner : Audience::Codegen;
            frags.push_back(f);
        }
        PromptRepository repo(frags, {tables.begin(), tables.end()});
        std::set<std::string> want_tables;
        for (const auto& t : tables)
            if (rng() % 2) want_tables.insert(t);

        std::set<std::string> expected;
        for (const auto& f : frags) {
            if (f.audience != Audience::Planner) continue;
            bool hit = f.global;
            for (const auto& t : f.tables) hit = hit || want_tables.count(t);
            if (hit) expected.insert(f.id);
        }
        const auto got = repo.filter_by_tables(Audience::Planner, want_tables);
        std::set<std::string> got_ids;
        for (const auto& f : got) got_ids.insert(f.id);
        CHECK(got_ids == expected);
        CHECK(got_ids.size() == got.size());
        for (std::size_t i = 1; i < got.size(); ++i)
            CHECK(std::pair(got[i - 1].priority, got[i - 1].id) < std::pair(got[i].priority, got[i].id));
    }
}

TEST_CASE("assemble layout") {
    std::vector<PromptFragment> frags{frag("a", {}, 0, "first"), frag("b", {"T"}, 1, "second")};
    auto p = assemble(frags, {{"T", "desc"}}, {{"T", "r1,r2"}});
    CHECK(p.text == "first\n\nsecond\n\n### TABLE T\ndesc\n\n### SAMPLE ROWS T\nr1,r2");
    CHECK(p.fragment_ids == std::vector<std::string>{"a", "b"});
    CHECK(p.token_count == estimate_tokens(p.text));
    auto words = assemble(frags, {}, {}, [](std::string_view s) { return text::words(s).size(); });
    CHECK(words.token_count == 2);
}

TEST_CASE("jsonl round trip and line-numbered errors") {
    PromptRepository repo({frag("g", {}, 0, "global text"), frag("t", {"T1", "T2"}, 3, "tagged")});
    std::stringstream ss;
    repo.write(ss);
    const auto back = PromptRepository::read(ss);
    CHECK(back.size() == 2);
    CHECK(back.all(Audience::Planner)[1].tables == std::set<std::string>{"T1", "T2"});

    std::stringstream dup(
        "{\"id\":\"x\",\"audience\":\"planner\",\"tables\":\"GLOBAL\",\"text\":\"a\"}\n"
        "\n"
        "{\"id\":\"x\",\"audience\":\"codegen\",\"tables\":[\"T\"],\"text\":\"b\"}\n");
    try {
        PromptRepository::read(dup);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(e.line() == 3);
    }
    std::stringstream bad_audience("{\"id\":\"x\",\"audience\":\"critic\",\"tables\":\"GLOBAL\",\"text\":\"a\"}\n");
    CHECK_THROWS_AS(PromptRepository::read(bad_audience), InputError);
}

TEST_CASE("synthetic repository has the documented shape") {
    const auto catalog = synthetic::schema();
    const auto repo = synthetic::repository(catalog);
    CHECK(catalog.tables().size() == 17);
    CHECK(repo.count(Audience::Planner) == 140);
    CHECK(repo.count(Audience::Codegen) == 44);
    const auto full = assemble_full(repo, Audience::Planner, catalog);
    CHECK(full.token_count >= 45000);
    CHECK(full.token_count <= 58000);
    for (const auto& cls : synthetic::token_reduction_classes()) {
        const auto r = measure_reduction(repo, Audience::Planner, cls.tables, catalog);
        CHECK(r.full_tokens == full.token_count);
        CHECK(r.reduction_pct >= 0.40);
    }
}
