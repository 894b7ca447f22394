#include <doctest.h>

#include <algorithm>

#include "semcache/prompt_assembly.hpp"
#include "semcache/reference_pattern.hpp"
#include "support.hpp"

using namespace semcache;
using namespace semcache::testing;

TEST_CASE("labeled fixture scripts") {
    const auto labels = nlohmann::json::parse(read_file(fixture_path("patterns/labels.json")));
    REQUIRE(labels.size() == 10);
    std::size_t code_tokens = 0;
    std::size_t pattern_tokens = 0;
    for (const auto& [name, want] : labels.items()) {
        CAPTURE(name);
        const auto code = read_file(fixture_path("patterns/" + name));
        REQUIRE_FALSE(code.empty());
        const auto p = extract_reference_pattern(code);
        CHECK(p.operations == want.at("operations").get<std::vector<std::string>>());
        CHECK(p.join_keys == want.at("join_keys").get<std::vector<std::string>>());
        CHECK(p.table_pattern == want.at("tables").get<std::vector<std::string>>());
        for (const auto& op : p.operations)
            CHECK(std::find(std::begin(kPatternOps), std::end(kPatternOps), op) != std::end(kPatternOps));
        const auto rendered = p.render();
        CHECK(estimate_tokens(rendered) * 10 <= estimate_tokens(code) * 4);
        code_tokens += estimate_tokens(code);
        pattern_tokens += estimate_tokens(rendered);
    }
    CHECK(pattern_tokens * 10 <= code_tokens * 3);
}

TEST_CASE("comments and docstrings do not contribute") {
    const auto p = extract_reference_pattern(
        "'''df.merge(x, on=\"K\")'''\n"
        "# plt.show()\n"
        "df = load_table(\"T\")  # df.groupby(\"a\")\n");
    CHECK(p.operations == std::vector<std::string>{"load_data"});
    CHECK(p.join_keys.empty());
}

TEST_CASE("hash characters inside strings are kept") {
    const auto p = extract_reference_pattern("df = load_table(\"T#1\")\ntotal = df.sum()\n");
    CHECK(p.operations == std::vector<std::string>{"load_data", "aggregate"});
    CHECK(p.table_pattern == std::vector<std::string>{"T#1"});
}

TEST_CASE("render format") {
    ReferencePattern p{{"load_data", "join_tables"}, {"ITEM_CODE"}, {"A", "B"}};
    CHECK(p.render() == "operations: load_data -> join_tables\njoin_keys: ITEM_CODE\ntables: A + B");
    CHECK(extract_reference_pattern("").empty());
}

TEST_CASE("mock code generator output is recognized") {
    DomainLexicon lex;
    MockCodeGenerator gen;
    const std::vector<std::string> plan{"Load INVENTORY_MASTER table", "Filter by ITEM_CODE = 'ITEM-001-BB0'",
                                        "Calculate sum of STOCK_VALUE", "Format as currency output"};
    const auto code = gen.generate(CodeGenInput{"q", plan, {}, std::nullopt, 0, {}});
    const auto p = extract_reference_pattern(code);
    CHECK(p.operations == std::vector<std::string>{"load_data", "filter", "aggregate"});
    CHECK(p.table_pattern == std::vector<std::string>{"INVENTORY_MASTER"});
}
