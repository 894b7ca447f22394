#include "semcache/pipeline.hpp"

#include <chrono>
#include <stdexcept>

#include <fmt/format.h>

#include "semcache/text.hpp"

namespace semcache {

std::string CodeGenInput::render() const {
    std::string out = context.text;
    out += "\n\nPLAN:\n";
    for (std::size_t i = 0; i < plan.size(); ++i) out += fmt::format("{}. {}\n", i + 1, plan[i]);
    if (feedback) out += "\n" + *feedback;
    return out;
}

void AgentSuite::validate() const {
    if (!guard) throw std::invalid_argument("agent suite is missing the guard");
    if (!intent_classifier) throw std::invalid_argument("agent suite is missing the intent classifier");
    if (!equivalence) throw std::invalid_argument("agent suite is missing the equivalence oracle");
    if (!planner) throw std::invalid_argument("agent suite is missing the planner");
    if (!code_generator) throw std::invalid_argument("agent suite is missing the code generator");
    if (!executor) throw std::invalid_argument("agent suite is missing the executor");
}

std::string format_retry_feedback(std::string_view error_message, std::string_view failed_code) {
    return fmt::format("{}\nError: {}\nFailed code:\n{}", kRetryFeedbackHeader, error_message, failed_code);
}

namespace {

std::atomic<std::uint64_t> g_run_counter{0};

std::int64_t wall_clock_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

// "<run>-<seq>"
std::pair<std::string, int> split_checkpoint_id(const std::string& id) {
    const auto dash = id.rfind('-');
    if (dash == std::string::npos) return {id, 0};
    try {
        return {id.substr(0, dash), std::stoi(id.substr(dash + 1))};
    } catch (const std::exception&) {
        return {id, 0};
    }
}

}  // namespace

Pipeline::Pipeline(AgentSuite agents, CacheStore& cache, const Embedder& embedder, const DomainLexicon& lexicon,
                   const PromptRepository& prompts, const SchemaCatalog& catalog, CheckpointStore& checkpoints,
                   PipelineConfig config)
    : agents_(std::move(agents)),
      cache_(cache),
      embedder_(embedder),
      lexicon_(lexicon),
      prompts_(prompts),
      catalog_(catalog),
      checkpoints_(checkpoints),
      config_(std::move(config)),
      matcher_(cache_, embedder_, lexicon_, (agents_.validate(), *agents_.equivalence), config_.match),
      schema_hash_(catalog_.schema_hash()) {
    if (config_.max_retries < 0 || config_.max_retries > 2)
        throw std::invalid_argument("max_retries must be within 0..2");
    if (embedder_.dimension() != cache_.dimension())
        throw std::invalid_argument("embedder and cache store dimensions differ");
    if (!config_.clock) config_.clock = wall_clock_ms;
}

std::string Pipeline::checkpoint(PipelineState& state) {
    std::string run;
    int seq = 0;
    if (state.checkpoint_id.empty()) {
        const auto n = g_run_counter.fetch_add(1);
        run = text::hex64(text::fnv1a64(state.query) ^ (n * 0x9e3779b97f4a7c15ULL));
    } else {
        std::tie(run, seq) = split_checkpoint_id(state.checkpoint_id);
        ++seq;
    }
    state.checkpoint_id = fmt::format("{}-{:04}", run, seq);
    checkpoints_.put(state.checkpoint_id, state_to_json(state));
    return state.checkpoint_id;
}

PipelineState Pipeline::restore(const std::string& checkpoint_id) const {
    auto j = checkpoints_.get(checkpoint_id);
    if (!j) throw std::out_of_range("unknown checkpoint id '" + checkpoint_id + "'");
    return state_from_json(*j);
}

RunResult Pipeline::run(std::string_view query, const RunOptions& options) {
    PipelineState state;
    state.query = std::string(query);
    state.extensions = options.extensions;
    return drive(std::move(state), options);
}

RunResult Pipeline::resume(const std::string& checkpoint_id, const RunOptions& options) {
    auto state = restore(checkpoint_id);
    for (const auto& [k, v] : options.extensions) state.extensions.try_emplace(k, v);
    return drive(std::move(state), options);
}

RunResult Pipeline::drive(PipelineState state, const RunOptions& options) {
    while (!state.terminal) {
        step(state);
        checkpoint(state);
        if (options.stop_after && state.stage == *options.stop_after && !state.terminal) break;
    }
    RunResult out{state.response.value_or(std::string{}), std::move(state)};
    return out;
}

void Pipeline::finish(PipelineState& state, std::string response) {
    state.response = std::move(response);
    state.terminal = true;
    state.stage = Stage::Done;
}

void Pipeline::fail(PipelineState& state, std::string error) {
    state.error = error;
    finish(state, "Error: " + error);
}

void Pipeline::generate_code(PipelineState& s, std::optional<std::string> feedback) {
    CodeGenInput in{s.query, *s.plan, context_for(s, Audience::Codegen), std::move(feedback), s.retry_count,
                    s.extensions};
    s.code = agents_.code_generator->generate(in);
    s.stage = Stage::Code;
}

AssembledPrompt Pipeline::context_for(const PipelineState& state, Audience audience) const {
    return assemble_for_tables(prompts_, audience, state.tables, catalog_);
}

void Pipeline::step(PipelineState& s) {
    const Stage current = s.stage;
    try {
        switch (current) {
            case Stage::Start: {
                const auto g = agents_.guard->evaluate(s.query);
                s.guard_verdict = g.verdict;
                s.stage = Stage::Guard;
                if (g.verdict == GuardVerdict::OffDomain) {
                    s.guard_guidance = g.guidance;
                    finish(s, g.guidance);
                }
                return;
            }
            case Stage::Guard: {
                auto r = agents_.intent_classifier->classify(s.query);
                s.intent = std::move(r.intent);
                s.tables = std::move(r.tables);
                s.signature = std::move(r.signature);
                s.stage = Stage::Intent;
                return;
            }
            case Stage::Intent: {
                s.match = matcher_.match(s.query, *s.signature);
                s.stage = Stage::Match;
                if (s.match->mode == MatchMode::Return) finish(s, s.match->candidate->response);
                return;
            }
            case Stage::Match: {
                PlannerInput in{s.query, s.intent, s.tables, s.signature, std::nullopt,
                                context_for(s, Audience::Planner)};
                if (s.match && s.match->mode == MatchMode::Guide) in.guidance = s.match->guidance;
                s.plan = agents_.planner->plan(in);
                s.stage = Stage::Plan;
                return;
            }
            case Stage::Plan:
                generate_code(s, std::nullopt);
                return;
            case Stage::Code: {
                s.execution = agents_.executor->execute(*s.code);
                if (!s.execution->ok() && !s.execution->error_message)
                    s.execution->error_message = s.execution->status == ExecStatus::Timeout ? "timeout" : "error";
                s.stage = Stage::Execute;
                if (!s.execution->ok()) {
                    if (s.retry_count >= config_.max_retries)
                        fail(s, *s.execution->error_message);
                    else
                        ++s.retry_count;
                    return;
                }
                if (!summarizer_on() && !insights_on()) finish(s, s.execution->text_out);
                return;
            }
            case Stage::Execute: {
                if (!s.execution->ok()) {
                    generate_code(s, format_retry_feedback(*s.execution->error_message, s.code.value_or("")));
                    return;
                }
                if (summarizer_on()) {
                    s.summary = agents_.summarizer->summarize(s.query, *s.execution);
                    s.stage = Stage::Summarize;
                    if (!insights_on()) finish(s, *s.summary);
                    return;
                }
                s.insights = agents_.insights->generate(*s.execution);
                s.stage = Stage::Insights;
                finish(s, s.execution->text_out);
                return;
            }
            case Stage::Summarize: {
                s.insights = agents_.insights->generate(*s.execution);
                s.stage = Stage::Insights;
                finish(s, s.summary.value_or(s.execution->text_out));
                return;
            }
            case Stage::Insights:
            case Stage::Done:
                finish(s, s.response.value_or(s.summary.value_or(s.execution ? s.execution->text_out : "")));
                return;
        }
    } catch (const std::exception& e) {
        fail(s, fmt::format("{} stage failed: {}", to_string(current), e.what()));
    }
}

std::optional<CacheEntry> Pipeline::record_outcome(const PipelineState& state) {
    if (!state.succeeded() || !state.match) return std::nullopt;
    const auto& m = *state.match;
    if (m.mode == MatchMode::Return) {
        if (m.candidate) cache_.record_return_hit(m.candidate->id);
        return std::nullopt;
    }
    if (m.mode == MatchMode::Guide && m.candidate) cache_.record_guide_hit(m.candidate->id);
    if (!config_.populate || !state.signature || !state.plan || !state.code || !state.response) return std::nullopt;
    auto entry = make_cache_entry(entry_id_for(state.query, schema_hash_), state.query, *state.signature,
                                  embedder_.embed(state.query), *state.plan, *state.code, *state.response,
                                  schema_hash_, config_.clock());
    cache_.insert(entry);
    return entry;
}

}  // namespace semcache
