#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "semcache/matcher.hpp"
#include "semcache/signature.hpp"

namespace semcache {

enum class GuardVerdict { Relevant, OffDomain };
enum class ExecStatus { Ok, Error, Timeout };

struct DataTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    friend bool operator==(const DataTable&, const DataTable&) = default;
};

struct ExecutionResult {
    ExecStatus status = ExecStatus::Ok;
    std::vector<DataTable> tables_out;
    std::string text_out;
    std::optional<std::string> error_message;  // present whenever status != Ok

    bool ok() const noexcept { return status == ExecStatus::Ok; }
    friend bool operator==(const ExecutionResult&, const ExecutionResult&) = default;
};

struct InsightsRecord {
    std::vector<std::pair<std::string, std::string>> metrics;  // name, value as printed in the results
    std::vector<std::string> insights;
    std::vector<std::string> recommendations;
    std::vector<std::string> followups;

    friend bool operator==(const InsightsRecord&, const InsightsRecord&) = default;
};

// Last completed stage of a run.
enum class Stage { Start, Guard, Intent, Match, Plan, Code, Execute, Summarize, Insights, Done };

std::string to_string(Stage s);
Stage stage_from_string(std::string_view s);

/// Per-query record threaded through every agent; checkpointed after each
/// stage transition.
struct PipelineState {
    std::string query;
    GuardVerdict guard_verdict = GuardVerdict::Relevant;
    std::optional<std::string> guard_guidance;
    std::string intent;
    std::set<std::string> tables;
    std::optional<QuerySignature> signature;
    std::optional<MatchDecision> match;
    std::optional<std::vector<std::string>> plan;
    std::optional<std::string> code;
    std::optional<ExecutionResult> execution;
    std::optional<std::string> summary;
    std::optional<InsightsRecord> insights;
    int retry_count = 0;  // 0..2
    std::string checkpoint_id;
    bool terminal = false;
    std::optional<std::string> response;
    std::optional<std::string> error;  // set on terminal failure
    Stage stage = Stage::Start;
    std::map<std::string, std::string> extensions;

    bool succeeded() const noexcept { return terminal && !error; }
};

void to_json(nlohmann::json& j, const DataTable& t);
void from_json(const nlohmann::json& j, DataTable& t);
void to_json(nlohmann::json& j, const ExecutionResult& r);
void from_json(const nlohmann::json& j, ExecutionResult& r);
void to_json(nlohmann::json& j, const InsightsRecord& r);
void from_json(const nlohmann::json& j, InsightsRecord& r);

nlohmann::json state_to_json(const PipelineState& s);
PipelineState state_from_json(const nlohmann::json& j);

// Field-for-field comparison through the serialized form.
bool same_state(const PipelineState& a, const PipelineState& b);

}  // namespace semcache
