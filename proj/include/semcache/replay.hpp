#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semcache/cache_store.hpp"
#include "semcache/embedding.hpp"
#include "semcache/lexicon.hpp"
#include "semcache/matcher.hpp"
#include "semcache/mock_agents.hpp"
#include "semcache/prompt_assembly.hpp"
#include "semcache/schema.hpp"
#include "semcache/synthetic.hpp"

namespace semcache {

// Each reader throws InputError carrying the 1-based line number.
std::vector<QueryLogRecord> read_query_log(std::istream& in);
std::vector<QueryLogRecord> read_query_log(const std::filesystem::path& path);
std::vector<SeedRecord> read_seed_corpus(std::istream& in);
std::vector<SeedRecord> read_seed_corpus(const std::filesystem::path& path);

void write_jsonl(std::ostream& out, const std::vector<nlohmann::json>& records);

// Signs, embeds and inserts every record; re-seeding replaces by normalized
// question. created_at is the record index so the result is reproducible.
std::size_t seed_cache(const std::vector<SeedRecord>& corpus, CacheStore& cache, const SchemaCatalog& catalog,
                       const DomainLexicon& lexicon, const Embedder& embedder);

struct ReplayConfig {
    Thresholds thresholds;
    std::size_t k = 5;
    // Overrides all four boost increments when set.
    std::optional<double> boost_increment;
    bool populate = false;
    std::size_t workers = 1;  // populate forces 1
    int max_retries = 2;
    LexiconConfig lexicon = default_lexicon_config();
};

struct TraceRecord {
    std::size_t index = 0;
    std::string query;
    MatchMode mode = MatchMode::Generate;
    bool guard_filtered = false;
    double s_base = 0.0;
    double s_adj = 0.0;
    std::optional<std::string> candidate_id;
    std::optional<MatchMode> expected_mode;
    bool ok = false;
    int retry_count = 0;
    std::size_t full_tokens = 0;      // counted for non-Return, on-domain records only
    std::size_t filtered_tokens = 0;
    std::string response;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

nlohmann::json trace_to_json(const TraceRecord& t);
TraceRecord trace_from_json(const nlohmann::json& j);

inline constexpr std::array<double, 6> kHistogramLower = {0.0, 0.3, 0.5, 0.7, 0.9, 0.99};

// [0,0.3) [0.3,0.5) [0.5,0.7) [0.7,0.9) [0.9,0.99) [0.99,1.0]
std::size_t histogram_bin(double s_base);

struct ReplayReport {
    std::size_t total = 0;
    std::map<MatchMode, std::size_t> mode_counts;  // all three modes present
    std::size_t guard_filtered = 0;                // included in Generate
    double utilization_pct = 0.0;                  // (Return + Guide) / total * 100
    std::array<std::size_t, 6> histogram{};
    ReductionReport token_reduction;
    std::size_t failures = 0;
    std::map<MatchMode, std::size_t> expected_counts;
    std::size_t mismatches = 0;
    std::size_t invalidated = 0;  // entries marked stale before the replay

    friend bool operator==(const ReplayReport&, const ReplayReport&) = default;
};

ReplayReport report_from_trace(const std::vector<TraceRecord>& trace);
nlohmann::json report_to_json(const ReplayReport& r);
ReplayReport report_from_json(const nlohmann::json& j);
std::string format_report(const ReplayReport& r);

struct ReplayResult {
    ReplayReport report;
    std::vector<TraceRecord> trace;
};

/// Runs every record through a mock-agent pipeline against `cache`, after
/// invalidating entries built for another schema. Records are independent
/// unless populate is on, so a worker pool yields the same trace.
ReplayResult replay(const std::vector<QueryLogRecord>& log, CacheStore& cache, const PromptRepository& prompts,
                    const SchemaCatalog& catalog, const FixtureRegistry& fixtures, const ReplayConfig& config);

}  // namespace semcache
