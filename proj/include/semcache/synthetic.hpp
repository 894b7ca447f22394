#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semcache/lexicon.hpp"
#include "semcache/matcher.hpp"
#include "semcache/mock_agents.hpp"
#include "semcache/prompt_assembly.hpp"
#include "semcache/schema.hpp"

namespace semcache {

// Simplified seed record: the seeder signs and embeds it on load.
struct SeedRecord {
    std::string question;
    std::vector<std::string> plan;
    std::string code;
    std::string response;
};

void to_json(nlohmann::json& j, const SeedRecord& r);
void from_json(const nlohmann::json& j, SeedRecord& r);

struct QueryLogRecord {
    std::string query;
    std::optional<MatchMode> expected_mode;
    std::optional<std::string> expected_intent;
    std::optional<std::string> fixture_id;
};

nlohmann::json log_record_to_json(const QueryLogRecord& r);
QueryLogRecord log_record_from_json(const nlohmann::json& j);

namespace synthetic {

// splitmix64; avoids the implementation-defined std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next();
    std::size_t below(std::size_t n);
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::uint64_t state_;
};

// 17-table inventory schema; description/sample sizes tuned with repository().
SchemaCatalog schema();

// 140 planner + 44 codegen fragments whose token mass mirrors a 50k-token
// full context with 2-4 table query classes.
PromptRepository repository(const SchemaCatalog& catalog);

struct QueryClass {
    std::string name;
    std::set<std::string> tables;
};

// Stock inquiry (2 tables), valuation (3), aging analysis (2), procurement (4).
std::vector<QueryClass> token_reduction_classes();

// `count` unique questions across five query families, with plans, code and
// responses produced by the mock agents.
std::vector<SeedRecord> seed_corpus(std::size_t count, const DomainLexicon& lexicon, std::uint64_t seed = 7);

struct LogShape {
    double return_share = 0.23;
    double guide_share = 0.44;  // remainder is Generate
};

// Exact duplicates of seeds, perturbed paraphrases of seeds, and novel
// domain queries, interleaved deterministically. Every record carries its
// expected mode; a few paraphrases bind the "flaky_once" fixture.
std::vector<QueryLogRecord> query_log(const std::vector<SeedRecord>& seeds, std::size_t count, LogShape shape = {},
                                      std::uint64_t seed = 11);

// Fixtures referenced by query_log().
FixtureRegistry fixtures();

}  // namespace synthetic
}  // namespace semcache
