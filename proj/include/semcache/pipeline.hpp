#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "semcache/agents.hpp"
#include "semcache/cache_store.hpp"
#include "semcache/checkpoint.hpp"
#include "semcache/embedding.hpp"
#include "semcache/lexicon.hpp"
#include "semcache/matcher.hpp"
#include "semcache/pipeline_state.hpp"
#include "semcache/prompt_assembly.hpp"
#include "semcache/schema.hpp"

namespace semcache {

struct PipelineConfig {
    MatchConfig match;
    int max_retries = 2;
    bool summarizer_enabled = true;
    bool insights_enabled = true;
    // Insert successful Guide/Generate outcomes as new cache entries.
    bool populate = true;
    // Timestamp source for new entries; wall-clock ms when empty.
    std::function<std::int64_t()> clock;
};

struct RunOptions {
    std::map<std::string, std::string> extensions;  // e.g. fixture_id
    // Checkpoint and return right after this stage completes.
    std::optional<Stage> stop_after;
};

struct RunResult {
    std::string response;  // empty when stopped before a terminal stage
    PipelineState state;
};

/// Per-query state machine:
///
///   Guard -> Intent -> Match -+-> (Return) cached response
///                             +-> Plan -> Code -> Execute -> [Summarize] -> [Insights]
///
/// Off-domain queries stop after Guard. Execution failures loop back to Code
/// with the error appended, at most max_retries times. Every completed stage
/// is checkpointed, and resume() continues a run from any checkpoint.
///
/// A Pipeline is cheap to construct and holds references only; the cache
/// store may be shared by pipelines running on other threads.
class Pipeline {
public:
    Pipeline(AgentSuite agents, CacheStore& cache, const Embedder& embedder, const DomainLexicon& lexicon,
             const PromptRepository& prompts, const SchemaCatalog& catalog, CheckpointStore& checkpoints,
             PipelineConfig config = {});

    RunResult run(std::string_view query, const RunOptions& options = {});
    RunResult resume(const std::string& checkpoint_id, const RunOptions& options = {});

    std::string checkpoint(PipelineState& state);
    // Throws std::out_of_range for an unknown id.
    PipelineState restore(const std::string& checkpoint_id) const;

    // Return: bumps the candidate's return_hits. Guide: bumps guide_hits.
    // Successful Guide/Generate with populate on: inserts and returns the new entry.
    std::optional<CacheEntry> record_outcome(const PipelineState& state);

    const std::string& schema_hash() const noexcept { return schema_hash_; }
    const PipelineConfig& config() const noexcept { return config_; }

private:
    RunResult drive(PipelineState state, const RunOptions& options);
    void step(PipelineState& state);
    void finish(PipelineState& state, std::string response);
    void fail(PipelineState& state, std::string error);
    void generate_code(PipelineState& state, std::optional<std::string> feedback);
    AssembledPrompt context_for(const PipelineState& state, Audience audience) const;
    bool summarizer_on() const noexcept { return config_.summarizer_enabled && agents_.summarizer != nullptr; }
    bool insights_on() const noexcept { return config_.insights_enabled && agents_.insights != nullptr; }

    AgentSuite agents_;
    CacheStore& cache_;
    const Embedder& embedder_;
    const DomainLexicon& lexicon_;
    const PromptRepository& prompts_;
    const SchemaCatalog& catalog_;
    CheckpointStore& checkpoints_;
    PipelineConfig config_;
    ReferenceMatcher matcher_;
    std::string schema_hash_;
};

}  // namespace semcache
