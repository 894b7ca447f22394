#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "semcache/matcher.hpp"
#include "semcache/pipeline_state.hpp"
#include "semcache/prompt_assembly.hpp"
#include "semcache/signature.hpp"

namespace semcache {

// Agent contracts. Each takes the slice of PipelineState it needs and returns
// its own output type; implementations must be callable concurrently.
// Throwing from any agent ends the run with a terminal error.

struct GuardResult {
    GuardVerdict verdict = GuardVerdict::Relevant;
    std::string guidance;  // shown to the user when off-domain
};

class GuardAgent {
public:
    virtual ~GuardAgent() = default;
    virtual GuardResult evaluate(std::string_view query) const = 0;
};

struct IntentResult {
    std::string intent;
    std::set<std::string> tables;
    QuerySignature signature;
};

class IntentClassifier {
public:
    virtual ~IntentClassifier() = default;
    virtual IntentResult classify(std::string_view query) const = 0;
};

struct PlannerInput {
    std::string query;
    std::string intent;
    std::set<std::string> tables;
    std::optional<QuerySignature> signature;
    std::optional<std::string> guidance;  // reference guidance block in Guide mode
    AssembledPrompt context;
};

class PlannerAgent {
public:
    virtual ~PlannerAgent() = default;
    virtual std::vector<std::string> plan(const PlannerInput& input) const = 0;
};

struct CodeGenInput {
    std::string query;
    std::vector<std::string> plan;
    AssembledPrompt context;
    // "PREVIOUS ATTEMPT FAILED:" block on retries
    std::optional<std::string> feedback;
    int attempt = 0;
    std::map<std::string, std::string> extensions;

    // Full text handed to a model: context, plan, then feedback.
    std::string render() const;
};

class CodeGenerator {
public:
    virtual ~CodeGenerator() = default;
    virtual std::string generate(const CodeGenInput& input) const = 0;
};

class Executor {
public:
    virtual ~Executor() = default;
    virtual ExecutionResult execute(std::string_view code) const = 0;
};

class Summarizer {
public:
    virtual ~Summarizer() = default;
    virtual std::string summarize(std::string_view query, const ExecutionResult& result) const = 0;
};

class InsightsGenerator {
public:
    virtual ~InsightsGenerator() = default;
    virtual InsightsRecord generate(const ExecutionResult& result) const = 0;
};

struct AgentSuite {
    std::shared_ptr<const GuardAgent> guard;
    std::shared_ptr<const IntentClassifier> intent_classifier;
    std::shared_ptr<const EquivalenceOracle> equivalence;
    std::shared_ptr<const PlannerAgent> planner;
    std::shared_ptr<const CodeGenerator> code_generator;
    std::shared_ptr<const Executor> executor;
    std::shared_ptr<const Summarizer> summarizer;        // optional stage
    std::shared_ptr<const InsightsGenerator> insights;   // optional stage

    // Throws std::invalid_argument naming the first missing required member.
    void validate() const;
};

inline constexpr std::string_view kRetryFeedbackHeader = "PREVIOUS ATTEMPT FAILED:";

std::string format_retry_feedback(std::string_view error_message, std::string_view failed_code);

}  // namespace semcache
