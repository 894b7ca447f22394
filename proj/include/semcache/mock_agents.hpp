#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semcache/agents.hpp"
#include "semcache/lexicon.hpp"

namespace semcache {

// Deterministic stand-ins for the LLM agents and the sandbox. Every mock
// counts its invocations so tests can prove which stages ran.

class CallCounter {
public:
    std::size_t calls() const noexcept { return calls_.load(); }

protected:
    void bump() const noexcept { calls_.fetch_add(1); }

private:
    mutable std::atomic<std::size_t> calls_{0};
};

class MockGuard final : public GuardAgent, public CallCounter {
public:
    explicit MockGuard(const DomainLexicon& lexicon);
    GuardResult evaluate(std::string_view query) const override;

    static constexpr std::string_view kGuidance =
        "I can only help with inventory analytics questions about stock, valuation, aging, procurement, or "
        "consumption. Please rephrase your question in terms of your inventory data.";

private:
    const DomainLexicon& lexicon_;
};

struct TablePattern {
    std::string primary;
    std::vector<std::string> joins;
};

// semantic category -> table pattern
std::map<std::string, TablePattern> default_category_tables();

/// Keyword rules over the query text: category, operation, metric, grouping,
/// filter types from recognized slots, and a per-category table pattern.
class MockIntentClassifier final : public IntentClassifier, public CallCounter {
public:
    explicit MockIntentClassifier(const DomainLexicon& lexicon,
                                  std::map<std::string, TablePattern> tables = default_category_tables());
    IntentResult classify(std::string_view query) const override;

private:
    const DomainLexicon& lexicon_;
    std::map<std::string, TablePattern> tables_;
};

// Column a slot field filters on, e.g. item_code -> ITEM_CODE.
std::string slot_column(const std::string& field);

// Fresh plan from a signature and the slot values found in the query.
std::vector<std::string> plan_from_signature(const QuerySignature& sig, const std::vector<SlotValue>& slots);

/// Guide mode: reference plan with [field] placeholders replaced by the
/// current values. Generate mode, or guidance without usable hints: a fresh
/// plan from the signature.
class MockPlanner final : public PlannerAgent, public CallCounter {
public:
    explicit MockPlanner(const DomainLexicon& lexicon) : lexicon_(lexicon) {}
    std::vector<std::string> plan(const PlannerInput& input) const override;

private:
    const DomainLexicon& lexicon_;
};

// Pandas-style code from plan steps, headed by "# fixture:" and "# attempt:" lines.
class MockCodeGenerator final : public CodeGenerator, public CallCounter {
public:
    std::string generate(const CodeGenInput& input) const override;
};

inline constexpr std::string_view kDefaultFixture = "default";

// fixture id -> result per attempt; the last entry repeats for later attempts
using FixtureRegistry = std::map<std::string, std::vector<ExecutionResult>>;

FixtureRegistry fixtures_from_json(const nlohmann::json& j);
nlohmann::json fixtures_to_json(const FixtureRegistry& r);

/// Resolves the code's fixture id to a canned result. Code without a bound
/// fixture gets a deterministic synthetic success derived from its body.
class MockExecutor final : public Executor, public CallCounter {
public:
    explicit MockExecutor(FixtureRegistry fixtures = {}) : fixtures_(std::move(fixtures)) {}
    ExecutionResult execute(std::string_view code) const override;

    const FixtureRegistry& fixtures() const noexcept { return fixtures_; }

private:
    FixtureRegistry fixtures_;
};

class MockSummarizer final : public Summarizer, public CallCounter {
public:
    std::string summarize(std::string_view query, const ExecutionResult& result) const override;
};

// Metrics come only from numeric cells of the result tables.
class MockInsightsGenerator final : public InsightsGenerator, public CallCounter {
public:
    InsightsRecord generate(const ExecutionResult& result) const override;
};

struct MockSuite {
    std::shared_ptr<MockGuard> guard;
    std::shared_ptr<MockIntentClassifier> intent;
    std::shared_ptr<MockEquivalenceOracle> equivalence;
    std::shared_ptr<MockPlanner> planner;
    std::shared_ptr<MockCodeGenerator> code_generator;
    std::shared_ptr<MockExecutor> executor;
    std::shared_ptr<MockSummarizer> summarizer;
    std::shared_ptr<MockInsightsGenerator> insights;

    AgentSuite suite() const;
};

// The lexicon must outlive the suite.
MockSuite make_mock_suite(const DomainLexicon& lexicon, FixtureRegistry fixtures = {});

}  // namespace semcache
