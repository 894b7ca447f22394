#include "semcache/pipeline_state.hpp"

#include <array>
#include <stdexcept>

#include "semcache/text.hpp"

namespace semcache {

namespace {
constexpr std::array<std::pair<Stage, const char*>, 10> kStageNames{{
    {Stage::Start, "start"},
    {Stage::Guard, "guard"},
    {Stage::Intent, "intent"},
    {Stage::Match, "match"},
    {Stage::Plan, "plan"},
    {Stage::Code, "code"},
    {Stage::Execute, "execute"},
    {Stage::Summarize, "summarize"},
    {Stage::Insights, "insights"},
    {Stage::Done, "done"},
}};

std::string status_name(ExecStatus s) {
    switch (s) {
        case ExecStatus::Ok: return "ok";
        case ExecStatus::Error: return "error";
        case ExecStatus::Timeout: return "timeout";
    }
    return "error";
}

ExecStatus status_from(const std::string& s) {
    if (s == "ok") return ExecStatus::Ok;
    if (s == "error") return ExecStatus::Error;
    if (s == "timeout") return ExecStatus::Timeout;
    throw std::invalid_argument("unknown execution status '" + s + "'");
}

template <typename T>
nlohmann::json opt(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> opt_get(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}
}  // namespace

std::string to_string(Stage s) {
    for (const auto& [stage, name] : kStageNames) {
        if (stage == s) return name;
    }
    return "start";
}

Stage stage_from_string(std::string_view s) {
    for (const auto& [stage, name] : kStageNames) {
        if (s == name) return stage;
    }
    throw std::invalid_argument("unknown stage '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const DataTable& t) {
    j = nlohmann::json{{"name", t.name}, {"columns", t.columns}, {"rows", t.rows}};
}

void from_json(const nlohmann::json& j, DataTable& t) {
    t.name = j.at("name").get<std::string>();
    t.columns = j.at("columns").get<std::vector<std::string>>();
    t.rows = j.at("rows").get<std::vector<std::vector<std::string>>>();
}

void to_json(nlohmann::json& j, const ExecutionResult& r) {
    j = nlohmann::json{{"status", status_name(r.status)},
                       {"tables_out", r.tables_out},
                       {"text_out", r.text_out},
                       {"error_message", opt(r.error_message)}};
}

void from_json(const nlohmann::json& j, ExecutionResult& r) {
    r.status = status_from(j.at("status").get<std::string>());
    r.tables_out = j.value("tables_out", std::vector<DataTable>{});
    r.text_out = j.value("text_out", std::string{});
    r.error_message = opt_get<std::string>(j, "error_message");
    if (r.status != ExecStatus::Ok && !r.error_message) r.error_message = status_name(r.status);
}

void to_json(nlohmann::json& j, const InsightsRecord& r) {
    nlohmann::json metrics = nlohmann::json::array();
    for (const auto& [name, value] : r.metrics) metrics.push_back({{"name", name}, {"value", value}});
    j = nlohmann::json{{"metrics", metrics},
                       {"insights", r.insights},
                       {"recommendations", r.recommendations},
                       {"followups", r.followups}};
}

void from_json(const nlohmann::json& j, InsightsRecord& r) {
    r.metrics.clear();
    for (const auto& m : j.at("metrics")) r.metrics.emplace_back(m.at("name").get<std::string>(), m.at("value").get<std::string>());
    r.insights = j.value("insights", std::vector<std::string>{});
    r.recommendations = j.value("recommendations", std::vector<std::string>{});
    r.followups = j.value("followups", std::vector<std::string>{});
}

nlohmann::json state_to_json(const PipelineState& s) {
    nlohmann::json j{{"query", s.query},
                     {"guard_verdict", s.guard_verdict == GuardVerdict::Relevant ? "relevant" : "off_domain"},
                     {"guard_guidance", opt(s.guard_guidance)},
                     {"intent", s.intent},
                     {"tables", s.tables},
                     {"plan", opt(s.plan)},
                     {"code", opt(s.code)},
                     {"execution", opt(s.execution)},
                     {"summary", opt(s.summary)},
                     {"insights", opt(s.insights)},
                     {"retry_count", s.retry_count},
                     {"checkpoint_id", s.checkpoint_id},
                     {"terminal", s.terminal},
                     {"response", opt(s.response)},
                     {"error", opt(s.error)},
                     {"stage", to_string(s.stage)},
                     {"extensions", s.extensions}};
    j["signature"] = s.signature ? nlohmann::json(*s.signature) : nlohmann::json(nullptr);
    j["match"] = s.match ? decision_to_json(*s.match) : nlohmann::json(nullptr);
    return j;
}

PipelineState state_from_json(const nlohmann::json& j) {
    PipelineState s;
    s.query = j.at("query").get<std::string>();
    s.guard_verdict = j.at("guard_verdict").get<std::string>() == "off_domain" ? GuardVerdict::OffDomain
                                                                               : GuardVerdict::Relevant;
    s.guard_guidance = opt_get<std::string>(j, "guard_guidance");
    s.intent = j.value("intent", std::string{});
    s.tables = j.value("tables", std::set<std::string>{});
    if (j.contains("signature") && !j.at("signature").is_null()) s.signature = signature_from_json(j.at("signature"));
    if (j.contains("match") && !j.at("match").is_null()) s.match = decision_from_json(j.at("match"));
    s.plan = opt_get<std::vector<std::string>>(j, "plan");
    s.code = opt_get<std::string>(j, "code");
    s.execution = opt_get<ExecutionResult>(j, "execution");
    s.summary = opt_get<std::string>(j, "summary");
    s.insights = opt_get<InsightsRecord>(j, "insights");
    s.retry_count = j.value("retry_count", 0);
    if (s.retry_count < 0 || s.retry_count > 2) throw std::invalid_argument("retry_count out of range");
    s.checkpoint_id = j.value("checkpoint_id", std::string{});
    s.terminal = j.value("terminal", false);
    s.response = opt_get<std::string>(j, "response");
    s.error = opt_get<std::string>(j, "error");
    s.stage = stage_from_string(j.value("stage", std::string("start")));
    s.extensions = j.value("extensions", std::map<std::string, std::string>{});
    return s;
}

bool same_state(const PipelineState& a, const PipelineState& b) { return state_to_json(a) == state_to_json(b); }

}  // namespace semcache
