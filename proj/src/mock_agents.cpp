#include "semcache/mock_agents.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include <fmt/format.h>

#include "semcache/text.hpp"

namespace semcache {

namespace {

bool has_any(std::string_view query, std::initializer_list<std::string_view> phrases) {
    return std::any_of(phrases.begin(), phrases.end(), [&](std::string_view p) { return contains_phrase_ci(query, p); });
}

bool has_field(const std::vector<SlotValue>& slots, std::string_view field) {
    return std::any_of(slots.begin(), slots.end(), [&](const SlotValue& s) { return s.field == field; });
}

std::string metric_column(const QuerySignature& sig) {
    const auto& metric = sig.primary_metric();
    const auto& cat = sig.semantic_category();
    if (metric == "value") return "STOCK_VALUE";
    if (metric == "count") return cat == "procurement" ? "PO_NUMBER" : "ITEM_CODE";
    if (cat == "consumption") return "CONSUMED_QTY";
    if (cat == "aging") return "AGED_QTY";
    if (cat == "procurement") return "ORDERED_QTY";
    return "ON_HAND_QTY";
}

}  // namespace

// ---- guard ------------------------------------------------------------------

MockGuard::MockGuard(const DomainLexicon& lexicon) : lexicon_(lexicon) {}

GuardResult MockGuard::evaluate(std::string_view query) const {
    bump();
    static constexpr std::string_view kDomainWords[] = {
        "item",    "items",     "sku",       "plant",     "plants",   "warehouse", "warehouses", "supplier",
        "suppliers", "vendor",  "vendors",   "order",     "orders",   "shipment",  "shipments",  "reorder",
        "lead time", "stock",   "inventory", "value",     "valuation", "aging",    "ageing",     "procurement",
        "consumption", "quantity", "purchase", "on-hand", "receipts", "demand",   "forecast",   "backorder",
        "backorders", "material", "materials", "locator", "bin",      "bins",      "uom",        "cycle count"};
    const bool domain = !lexicon_.extract_slots(query).empty() ||
                        std::any_of(std::begin(kDomainWords), std::end(kDomainWords),
                                    [&](std::string_view w) { return contains_phrase_ci(query, w); });
    if (domain) return {GuardVerdict::Relevant, {}};
    return {GuardVerdict::OffDomain, std::string(kGuidance)};
}

// ---- intent -----------------------------------------------------------------

std::map<std::string, TablePattern> default_category_tables() {
    return {
        {"valuation", {"INVENTORY_MASTER", {}}},
        {"stock", {"STOCK_ON_HAND", {"INVENTORY_MASTER"}}},
        {"aging", {"STOCK_AGING", {"INVENTORY_MASTER"}}},
        {"procurement", {"PURCHASE_ORDERS", {"PO_LINES", "SUPPLIERS", "INVENTORY_MASTER"}}},
        {"consumption", {"MATERIAL_TRANSACTIONS", {"INVENTORY_MASTER"}}},
        {"other", {"INVENTORY_MASTER", {}}},
    };
}

MockIntentClassifier::MockIntentClassifier(const DomainLexicon& lexicon, std::map<std::string, TablePattern> tables)
    : lexicon_(lexicon), tables_(std::move(tables)) {
    if (!tables_.count("other")) throw std::invalid_argument("category table map needs an 'other' entry");
}

IntentResult MockIntentClassifier::classify(std::string_view query) const {
    bump();
    static const std::regex by_org(R"(\bby (organization|organisation|plant|location|warehouse)s?\b)", std::regex::icase);
    static const std::regex by_slab(R"(\bby (slab|bucket|aging bucket|age bucket)s?\b)", std::regex::icase);
    static const std::regex by_category(R"(\bby (category|categories)\b)", std::regex::icase);
    static const std::regex by_supplier(R"(\bby (supplier|vendor)s?\b)", std::regex::icase);
    static const std::regex by_month(R"(\bby month\b)", std::regex::icase);
    static const std::regex top_n(R"(\btop [0-9]+\b)", std::regex::icase);
    static const std::regex relative_period(R"(\b(last|this|previous|past) (week|month|quarter|year)\b)",
                                            std::regex::icase);

    const std::string q(query);
    const auto slots = lexicon_.extract_slots(query);

    SignatureFields f;
    if (has_any(q, {"aging", "ageing", "age bucket", "aged", "days old"}))
        f.semantic_category = "aging";
    else if (has_any(q, {"purchase order", "purchase orders", "purchase", "po", "procurement", "supplier", "suppliers",
                         "vendor", "vendors", "lead time"}))
        f.semantic_category = "procurement";
    else if (has_any(q, {"consumption", "usage", "consumed", "issued"}))
        f.semantic_category = "consumption";
    else if (has_any(q, {"value", "valuation", "worth", "cost"}))
        f.semantic_category = "valuation";
    else if (has_any(q, {"stock", "inventory", "on-hand", "on hand", "quantity", "qty"}))
        f.semantic_category = "stock";
    else
        f.semantic_category = "other";

    if (has_any(q, {"average", "mean", "avg"}))
        f.aggregation = "avg";
    else if (has_any(q, {"how many", "count", "number of"}))
        f.aggregation = "count";
    else if (has_any(q, {"total", "sum", "overall"}))
        f.aggregation = "sum";
    else
        f.aggregation = "none";

    if (has_any(q, {"trend", "over time", "monthly", "weekly"}))
        f.query_type = "trend";
    else if (f.aggregation != "none" || contains_phrase_ci(q, "by"))
        f.query_type = "analytical";
    else
        f.query_type = "lookup";

    if (has_any(q, {"value", "worth", "cost", "valuation"}))
        f.primary_metric = "value";
    else if (f.aggregation == "count")
        f.primary_metric = "count";
    else
        f.primary_metric = "quantity";

    if (std::regex_search(q, by_org))
        f.grouping = "organization";
    else if (std::regex_search(q, by_slab))
        f.grouping = "slab";
    else if (std::regex_search(q, by_category))
        f.grouping = "category";
    else if (std::regex_search(q, by_supplier))
        f.grouping = "supplier";
    else if (std::regex_search(q, by_month))
        f.grouping = "month";
    else if (has_field(slots, "item_code") || has_any(q, {"per item", "each item"}))
        f.grouping = "item";
    else
        f.grouping = "none";

    if (has_field(slots, "item_code")) f.filter_types.push_back("item_code");
    if (has_field(slots, lexicon_.config().location_field)) f.filter_types.push_back("location");
    if (has_field(slots, "date") || std::regex_search(q, relative_period)) f.filter_types.push_back("time_period");
    if (f.grouping != "category" && has_any(q, {"category", "categories", "class"})) f.filter_types.push_back("category");
    if (has_any(q, {"above", "below", "greater than", "less than", "more than", "exceeding", "under"}))
        f.filter_types.push_back("threshold");

    if (has_any(q, {"compare", "versus", "vs"})) f.semantic_flags.push_back("comparative");
    if (has_any(q, {"per unit", "unit cost"})) f.semantic_flags.push_back("per_unit");
    if (std::regex_search(q, top_n) || has_any(q, {"highest", "lowest", "largest", "smallest"}))
        f.semantic_flags.push_back("top_n");
    if (contains_phrase_ci(q, "open")) f.semantic_flags.push_back("open_status");

    auto it = tables_.find(f.semantic_category);
    const auto& pattern = it != tables_.end() ? it->second : tables_.at("other");
    f.primary_table = pattern.primary;
    f.required_joins = pattern.joins;

    QuerySignature sig(f);
    auto tables = sig.tables();
    const std::string intent = sig.semantic_category() == "stock" ? "stock_current" : sig.semantic_category();
    return IntentResult{intent, std::move(tables), std::move(sig)};
}

// ---- planner ----------------------------------------------------------------

std::string slot_column(const std::string& field) {
    if (field == "organization" || field == "location") return "ORGANIZATION";
    if (field == "date") return "TRANSACTION_DATE";
    return text::normalize_table(field);
}

std::vector<std::string> plan_from_signature(const QuerySignature& sig, const std::vector<SlotValue>& slots) {
    std::vector<std::string> steps;
    steps.push_back("Load " + sig.primary_table() + " table");
    for (const auto& j : sig.required_joins()) steps.push_back("Join " + j + " on ITEM_CODE");
    for (const auto& s : slots) steps.push_back(fmt::format("Filter by {} = '{}'", slot_column(s.field), s.value));
    if (sig.grouping() != "none" && sig.grouping() != "item") steps.push_back("Group by " + text::to_upper(sig.grouping()));
    const auto col = metric_column(sig);
    if (sig.aggregation() == "sum")
        steps.push_back("Calculate sum of " + col);
    else if (sig.aggregation() == "avg")
        steps.push_back("Calculate average of " + col);
    else if (sig.aggregation() == "count")
        steps.push_back("Calculate count of " + col);
    else
        steps.push_back("Select " + col);
    if (sig.query_type() == "trend") steps.push_back("Plot " + col + " over time");
    steps.push_back(std::string("Format as ") + (sig.primary_metric() == "value" ? "currency" : "number") + " output");
    return steps;
}

std::vector<std::string> MockPlanner::plan(const PlannerInput& input) const {
    bump();
    const auto slots = lexicon_.extract_slots(input.query);
    if (input.guidance) {
        const auto parsed = parse_guidance(*input.guidance);
        std::vector<std::string> steps = parsed.plan;
        for (auto& step : steps) {
            for (const auto& h : parsed.adaptations) text::replace_all(step, "[" + h.field + "]", h.current_value);
        }
        // Without hints the reference plan is only reusable if it already names our values.
        const bool placeholders_left = std::any_of(steps.begin(), steps.end(), [](const std::string& s) {
            return s.find('[') != std::string::npos;
        });
        const auto joined = text::join(steps, "\n");
        const bool values_present = std::all_of(slots.begin(), slots.end(), [&](const SlotValue& s) {
            return joined.find(s.value) != std::string::npos;
        });
        if (!placeholders_left && values_present) return steps;
    }
    if (!input.signature) throw std::runtime_error("planner needs a signature to plan from scratch");
    return plan_from_signature(*input.signature, slots);
}

// ---- code generator ---------------------------------------------------------

std::string MockCodeGenerator::generate(const CodeGenInput& input) const {
    bump();
    static const std::regex load(R"(^Load (\S+) table$)");
    static const std::regex join(R"(^Join (\S+) on (\S+)$)");
    static const std::regex filter(R"(^Filter by (\S+) = '(.*)'$)");
    static const std::regex group(R"(^Group by (\S+)$)");
    static const std::regex calc(R"(^Calculate (sum|average|count) of (\S+)$)");
    static const std::regex select(R"(^Select (\S+)$)");
    static const std::regex plot(R"(^Plot (\S+) over time$)");
    static const std::regex format(R"(^Format as (\w+) output$)");

    auto fixture = input.extensions.find("fixture_id");
    std::string code = fmt::format("# fixture: {}\n# attempt: {}\n",
                                   fixture != input.extensions.end() ? fixture->second : std::string(kDefaultFixture),
                                   input.attempt);
    if (input.feedback) code += "# regenerated after a failed attempt\n";
    code += "import pandas as pd\n\n";

    bool loaded = false;
    std::smatch m;
    for (const auto& step : input.plan) {
        if (std::regex_match(step, m, load)) {
            code += loaded ? fmt::format("{}_df = load_table(\"{}\")\n", text::to_lower(m[1].str()), m[1].str())
                           : fmt::format("df = load_table(\"{}\")\n", m[1].str());
            loaded = true;
        } else if (std::regex_match(step, m, join)) {
            code += fmt::format("df = df.merge(load_table(\"{}\"), on=\"{}\", how=\"left\")\n", m[1].str(), m[2].str());
        } else if (std::regex_match(step, m, filter)) {
            code += fmt::format("df = df[df[\"{}\"] == \"{}\"]\n", m[1].str(), m[2].str());
        } else if (std::regex_match(step, m, group)) {
            code += fmt::format("df = df.groupby(\"{}\", as_index=False)\n", m[1].str());
        } else if (std::regex_match(step, m, calc)) {
            const auto fn = m[1].str() == "average" ? "mean" : m[1].str();
            code += fmt::format("result = df[\"{}\"].{}()\n", m[2].str(), fn);
        } else if (std::regex_match(step, m, select)) {
            code += fmt::format("result = df[[\"{}\"]]\n", m[1].str());
        } else if (std::regex_match(step, m, plot)) {
            code += fmt::format("result.plot(title=\"{} over time\")\n", m[1].str());
        } else if (std::regex_match(step, m, format)) {
            code += fmt::format("print(format_output(result, \"{}\"))\n", m[1].str());
        } else {
            code += "# step: " + step + "\n";
        }
    }
    return code;
}

// ---- executor ---------------------------------------------------------------

FixtureRegistry fixtures_from_json(const nlohmann::json& j) {
    FixtureRegistry out;
    const auto& root = j.contains("fixtures") ? j.at("fixtures") : j;
    if (!root.is_object()) throw InputError("fixtures must be an object keyed by fixture id");
    for (const auto& [id, spec] : root.items()) {
        std::vector<ExecutionResult> attempts;
        try {
            attempts = spec.at("attempts").get<std::vector<ExecutionResult>>();
        } catch (const std::exception& e) {
            throw InputError("bad fixture '" + id + "': " + e.what());
        }
        if (attempts.empty()) throw InputError("fixture '" + id + "' has no attempts");
        out.emplace(id, std::move(attempts));
    }
    return out;
}

nlohmann::json fixtures_to_json(const FixtureRegistry& r) {
    nlohmann::json fixtures = nlohmann::json::object();
    for (const auto& [id, attempts] : r) fixtures[id] = {{"attempts", attempts}};
    return {{"fixtures", fixtures}};
}

ExecutionResult MockExecutor::execute(std::string_view code) const {
    bump();
    std::string fixture(kDefaultFixture);
    int attempt = 0;
    std::string body;
    for (const auto& line : text::split(code, '\n')) {
        if (line.rfind("# fixture: ", 0) == 0) {
            fixture = text::trim(line.substr(11));
        } else if (line.rfind("# attempt: ", 0) == 0) {
            attempt = std::stoi(line.substr(11));
        } else if (!line.empty() && line.front() != '#') {
            body += line + "\n";
        }
    }

    auto it = fixtures_.find(fixture);
    if (it != fixtures_.end() && !it->second.empty()) {
        const auto& attempts = it->second;
        return attempts[std::min<std::size_t>(static_cast<std::size_t>(std::max(attempt, 0)), attempts.size() - 1)];
    }
    if (fixture != kDefaultFixture) {
        return ExecutionResult{ExecStatus::Error, {}, {}, "unknown fixture '" + fixture + "'"};
    }

    const auto h = text::fnv1a64(body);
    const auto total = fmt::format("{:.2f}", static_cast<double>(h % 10'000'000ULL) / 100.0);
    const auto rows = std::to_string((h >> 32) % 500 + 1);
    ExecutionResult r;
    r.tables_out.push_back(DataTable{"result", {"metric", "value"}, {{"total", total}, {"rows", rows}}});
    r.text_out = "total = " + total + "; rows = " + rows;
    return r;
}

// ---- output stages ----------------------------------------------------------

std::string MockSummarizer::summarize(std::string_view query, const ExecutionResult& result) const {
    bump();
    return fmt::format("Result for \"{}\": {}", query, result.text_out);
}

InsightsRecord MockInsightsGenerator::generate(const ExecutionResult& result) const {
    bump();
    static const std::regex numeric(R"(^-?[0-9]+(\.[0-9]+)?$)");
    InsightsRecord r;
    for (const auto& table : result.tables_out) {
        for (const auto& row : table.rows) {
            for (std::size_t c = 1; c < row.size(); ++c) {
                if (std::regex_match(row[c], numeric)) r.metrics.emplace_back(row[0], row[c]);
            }
        }
    }
    for (const auto& [name, value] : r.metrics) {
        r.insights.push_back(name + " is " + value);
        r.followups.push_back("Show " + name + " by organization");
    }
    if (!r.metrics.empty()) r.recommendations.push_back("Review " + r.metrics.front().first + " against target levels");
    return r;
}

AgentSuite MockSuite::suite() const {
    return AgentSuite{guard, intent, equivalence, planner, code_generator, executor, summarizer, insights};
}

MockSuite make_mock_suite(const DomainLexicon& lexicon, FixtureRegistry fixtures) {
    MockSuite s;
    s.guard = std::make_shared<MockGuard>(lexicon);
    s.intent = std::make_shared<MockIntentClassifier>(lexicon);
    s.equivalence = std::make_shared<MockEquivalenceOracle>(lexicon);
    s.planner = std::make_shared<MockPlanner>(lexicon);
    s.code_generator = std::make_shared<MockCodeGenerator>();
    s.executor = std::make_shared<MockExecutor>(std::move(fixtures));
    s.summarizer = std::make_shared<MockSummarizer>();
    s.insights = std::make_shared<MockInsightsGenerator>();
    return s;
}

}  // namespace semcache
