#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semcache/schema.hpp"

namespace semcache {

enum class Audience { Planner, Codegen };

std::string to_string(Audience a);
Audience audience_from_string(std::string_view s);

struct PromptFragment {
    std::string id;
    std::string text;
    bool global = false;            // applies regardless of tables
    std::set<std::string> tables;   // empty when global
    int priority = 0;               // lower sorts first
    Audience audience = Audience::Planner;
};

struct AssembledPrompt {
    std::string text;
    std::vector<std::string> fragment_ids;
    std::size_t token_count = 0;
    std::set<std::string> tables;
};

struct ReductionReport {
    std::size_t full_tokens = 0;
    std::size_t filtered_tokens = 0;
    double reduction_pct = 0.0;  // fraction, 1 - filtered/full

    static ReductionReport from_counts(std::size_t full, std::size_t filtered);
    ReductionReport& operator+=(const ReductionReport& other);
    friend bool operator==(const ReductionReport&, const ReductionReport&) = default;
};

using TokenEstimator = std::function<std::size_t(std::string_view)>;

// ceil(code points / 4)
std::size_t estimate_tokens(std::string_view text);

/// Table-tagged prompt fragments, immutable after construction.
///
/// Source format is one JSON object per line:
///   {"id": "...", "audience": "planner"|"codegen", "priority": 10,
///    "tables": ["T1", "T2"] | "GLOBAL", "text": "..."}
class PromptRepository {
public:
    // known_tables bounds what filter_by_tables accepts; when empty it is the
    // union of all fragment tags.
    explicit PromptRepository(std::vector<PromptFragment> fragments, std::set<std::string> known_tables = {});

    static PromptRepository read(std::istream& in, std::set<std::string> known_tables = {});
    static PromptRepository load(const std::filesystem::path& path, std::set<std::string> known_tables = {});
    void write(std::ostream& out) const;

    std::size_t size() const noexcept { return fragments_.size(); }
    std::size_t count(Audience a) const;
    const std::set<std::string>& known_tables() const noexcept { return known_tables_; }

    // Every fragment for the audience in (priority, id) order.
    std::vector<PromptFragment> all(Audience a) const;

    // Global fragments plus those whose tags intersect `tables`, in (priority, id) order.
    // Throws std::invalid_argument listing any table outside known_tables().
    std::vector<PromptFragment> filter_by_tables(Audience a, const std::set<std::string>& tables) const;

private:
    std::vector<PromptFragment> fragments_;  // sorted by (audience, priority, id)
    std::set<std::string> known_tables_;
};

// Fragment texts, then one description block per table, then one sample-row
// block per table; blocks separated by a blank line.
AssembledPrompt assemble(std::span<const PromptFragment> fragments,
                         const std::map<std::string, std::string>& table_descriptions,
                         const std::map<std::string, std::string>& sample_rows,
                         const TokenEstimator& estimator = estimate_tokens);

// Filtered prompt for `tables`, with their descriptions and samples from the catalog.
AssembledPrompt assemble_for_tables(const PromptRepository& repo, Audience audience,
                                    const std::set<std::string>& tables, const SchemaCatalog& catalog,
                                    const TokenEstimator& estimator = estimate_tokens);

// Baseline: every fragment and every catalog table.
AssembledPrompt assemble_full(const PromptRepository& repo, Audience audience, const SchemaCatalog& catalog,
                              const TokenEstimator& estimator = estimate_tokens);

ReductionReport measure_reduction(const PromptRepository& repo, Audience audience,
                                  const std::set<std::string>& tables, const SchemaCatalog& catalog,
                                  const TokenEstimator& estimator = estimate_tokens);

}  // namespace semcache
