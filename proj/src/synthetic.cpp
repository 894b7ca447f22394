#include "semcache/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "semcache/text.hpp"

namespace semcache {

void to_json(nlohmann::json& j, const SeedRecord& r) {
    j = nlohmann::json{{"question", r.question}, {"plan", r.plan}, {"code", r.code}, {"response", r.response}};
}

void from_json(const nlohmann::json& j, SeedRecord& r) {
    r.question = j.at("question").get<std::string>();
    r.plan = j.at("plan").get<std::vector<std::string>>();
    r.code = j.value("code", std::string{});
    r.response = j.at("response").get<std::string>();
}

nlohmann::json log_record_to_json(const QueryLogRecord& r) {
    nlohmann::json j{{"query", r.query}};
    if (r.expected_mode) j["expected_mode"] = to_string(*r.expected_mode);
    if (r.expected_intent) j["expected_intent"] = *r.expected_intent;
    if (r.fixture_id) j["fixture_id"] = *r.fixture_id;
    return j;
}

QueryLogRecord log_record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("query log record must be an object");
    QueryLogRecord r;
    r.query = j.at("query").get<std::string>();
    if (text::trim(r.query).empty()) throw std::invalid_argument("query is empty");
    if (j.contains("expected_mode") && !j.at("expected_mode").is_null())
        r.expected_mode = mode_from_string(j.at("expected_mode").get<std::string>());
    if (j.contains("expected_intent") && !j.at("expected_intent").is_null())
        r.expected_intent = j.at("expected_intent").get<std::string>();
    if (j.contains("fixture_id") && !j.at("fixture_id").is_null()) r.fixture_id = j.at("fixture_id").get<std::string>();
    return r;
}

namespace synthetic {

Rng::Rng(std::uint64_t seed) : state_(seed) {}

std::uint64_t Rng::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::size_t Rng::below(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    return static_cast<std::size_t>(next() % n);
}

namespace {

constexpr const char* kFillerWords[] = {
    "ensure", "column", "values", "rows",  "join",   "key",    "filter", "period", "report",  "units",
    "totals", "apply",  "rule",   "scope", "record", "status", "ledger", "amount", "balance", "format"};

// Exactly tokens*4 ASCII characters.
std::string filler(const std::string& label, std::size_t tokens, Rng& rng) {
    const std::size_t target = tokens * 4;
    std::string out = label + ":";
    while (out.size() < target) {
        out += ' ';
        out += kFillerWords[rng.below(std::size(kFillerWords))];
    }
    out.resize(target);
    if (!out.empty() && out.back() == ' ') out.back() = '.';
    return out;
}

struct TableSpec {
    const char* name;
    std::vector<std::string> columns;
    std::size_t weight;  // planner-side token mass: fragments + description + samples
};

const std::vector<TableSpec>& table_specs() {
    static const std::vector<TableSpec> specs = {
        {"INVENTORY_MASTER", {"ITEM_CODE", "DESCRIPTION", "ORGANIZATION", "STOCK_VALUE", "UOM"}, 5000},
        {"STOCK_ON_HAND", {"ITEM_CODE", "ORGANIZATION", "LOCATOR", "ON_HAND_QTY"}, 5500},
        {"ITEM_COSTS", {"ITEM_CODE", "ORGANIZATION", "UNIT_COST", "COST_TYPE"}, 8000},
        {"STOCK_AGING", {"ITEM_CODE", "ORGANIZATION", "SLAB", "AGED_QTY", "AGED_VALUE"}, 8000},
        {"PURCHASE_ORDERS", {"PO_NUMBER", "SUPPLIER_ID", "ORGANIZATION", "STATUS", "ORDER_DATE"}, 6000},
        {"PO_LINES", {"PO_NUMBER", "LINE_NO", "ITEM_CODE", "ORDERED_QTY", "PRICE"}, 5000},
        {"SUPPLIERS", {"SUPPLIER_ID", "NAME", "LEAD_TIME_DAYS"}, 5000},
        {"MATERIAL_TRANSACTIONS", {"TXN_ID", "ITEM_CODE", "ORGANIZATION", "CONSUMED_QTY", "TRANSACTION_DATE"}, 100},
        {"ORGANIZATIONS", {"ORGANIZATION", "NAME", "REGION"}, 100},
        {"LOCATORS", {"LOCATOR", "ORGANIZATION", "ZONE"}, 100},
        {"ITEM_CATEGORIES", {"ITEM_CODE", "CATEGORY"}, 100},
        {"UNITS_OF_MEASURE", {"UOM", "DESCRIPTION"}, 100},
        {"RECEIPTS", {"RECEIPT_ID", "PO_NUMBER", "RECEIVED_QTY", "RECEIPT_DATE"}, 100},
        {"SALES_ORDERS", {"SO_NUMBER", "ITEM_CODE", "ORDERED_QTY"}, 100},
        {"DEMAND_FORECAST", {"ITEM_CODE", "PERIOD", "FORECAST_QTY"}, 100},
        {"REORDER_POLICIES", {"ITEM_CODE", "ORGANIZATION", "REORDER_LEVEL", "SAFETY_STOCK"}, 100},
        {"CYCLE_COUNTS", {"COUNT_ID", "ITEM_CODE", "LOCATOR", "VARIANCE_QTY"}, 100},
    };
    return specs;
}

bool is_large(const TableSpec& t) { return t.weight >= 1000; }

std::size_t description_tokens(const TableSpec& t) { return is_large(t) ? t.weight * 12 / 100 : 40; }
std::size_t sample_tokens(const TableSpec& t) { return is_large(t) ? t.weight * 8 / 100 : 20; }

}  // namespace

SchemaCatalog schema() {
    Rng rng(101);
    std::map<std::string, TableInfo> tables;
    for (const auto& t : table_specs()) {
        TableInfo info;
        info.columns = t.columns;
        info.description = filler(std::string(t.name) + " columns " + text::join(t.columns, ", "), description_tokens(t), rng);
        info.sample_rows = filler(text::join(t.columns, ","), sample_tokens(t), rng);
        tables.emplace(t.name, std::move(info));
    }
    return SchemaCatalog(std::move(tables));
}

PromptRepository repository(const SchemaCatalog& catalog) {
    Rng rng(202);
    std::vector<PromptFragment> out;
    auto add = [&](std::string id, Audience a, int priority, std::set<std::string> tables, std::size_t tokens) {
        PromptFragment f;
        f.text = filler(id, tokens, rng);
        f.id = std::move(id);
        f.audience = a;
        f.priority = priority;
        f.global = tables.empty();
        f.tables = std::move(tables);
        out.push_back(std::move(f));
    };

    // planner: 20 global + 15 per large table + 1 per small table + 5 cross-tagged = 140
    for (int i = 0; i < 20; ++i) add(fmt::format("planner-global-{:02}", i), Audience::Planner, i, {}, 400);
    int prio = 100;
    for (const auto& t : table_specs()) {
        if (is_large(t)) {
            const std::size_t mass = t.weight - description_tokens(t) - sample_tokens(t);
            for (int i = 0; i < 15; ++i)
                add(fmt::format("planner-{}-{:02}", text::to_lower(t.name), i), Audience::Planner, prio++, {t.name},
                    mass / 15 + (static_cast<std::size_t>(i) < mass % 15 ? 1 : 0));
        } else {
            add(fmt::format("planner-{}-00", text::to_lower(t.name)), Audience::Planner, prio++, {t.name},
                t.weight - description_tokens(t) - sample_tokens(t));
        }
    }
    const std::vector<std::set<std::string>> small_pairs = {{"RECEIPTS", "ORGANIZATIONS"},
                                                            {"LOCATORS", "CYCLE_COUNTS"},
                                                            {"SALES_ORDERS", "DEMAND_FORECAST"},
                                                            {"REORDER_POLICIES", "UNITS_OF_MEASURE"},
                                                            {"ITEM_CATEGORIES", "MATERIAL_TRANSACTIONS"}};
    for (std::size_t i = 0; i < small_pairs.size(); ++i)
        add(fmt::format("planner-cross-{:02}", i), Audience::Planner, prio++, small_pairs[i], 60);

    // codegen: 6 global + 3 per large table + 1 per small table + 7 cross-tagged = 44
    for (int i = 0; i < 6; ++i) add(fmt::format("codegen-global-{:02}", i), Audience::Codegen, i, {}, 300);
    prio = 100;
    for (const auto& t : table_specs()) {
        const int n = is_large(t) ? 3 : 1;
        for (int i = 0; i < n; ++i)
            add(fmt::format("codegen-{}-{:02}", text::to_lower(t.name), i), Audience::Codegen, prio++, {t.name},
                is_large(t) ? 150 : 60);
    }
    const std::vector<std::set<std::string>> cross = {
        {"PO_LINES", "RECEIPTS"},           {"STOCK_ON_HAND", "LOCATORS"},      {"INVENTORY_MASTER", "ITEM_CATEGORIES"},
        {"STOCK_AGING", "ORGANIZATIONS"},   {"ITEM_COSTS", "UNITS_OF_MEASURE"}, {"SUPPLIERS", "RECEIPTS"},
        {"SALES_ORDERS", "DEMAND_FORECAST"}};
    for (std::size_t i = 0; i < cross.size(); ++i)
        add(fmt::format("codegen-cross-{:02}", i), Audience::Codegen, prio++, cross[i], 60);

    return PromptRepository(std::move(out), catalog.table_names());
}

std::vector<QueryClass> token_reduction_classes() {
    return {
        {"stock_inquiry", {"STOCK_ON_HAND", "INVENTORY_MASTER"}},
        {"valuation", {"INVENTORY_MASTER", "ITEM_COSTS", "STOCK_ON_HAND"}},
        {"aging_analysis", {"STOCK_AGING", "INVENTORY_MASTER"}},
        {"procurement", {"PURCHASE_ORDERS", "PO_LINES", "SUPPLIERS", "INVENTORY_MASTER"}},
    };
}

namespace {

constexpr const char* kFamilies[] = {
    "What is the total stock value for item code {item} at {plant}?",
    "Show the on-hand quantity of {item} in {plant}",
    "List aging buckets by slab for {item} at {plant}",
    "How many open purchase orders exist for {item} at {plant}?",
    "What was the monthly consumption trend of {item} at {plant}?",
};
constexpr const char* kFamilyIntents[] = {"valuation", "stock_current", "aging", "procurement", "consumption"};
constexpr std::size_t kItems = 30;
constexpr std::size_t kPlants = 8;

std::string item_code(std::size_t i) {
    static constexpr char kLetters[] = "ABCDEFGHJKLMNPQRSTUVWXYZ";
    return fmt::format("ITEM-{:03}-{}{}{}", i + 1, kLetters[(i * 7) % 24], kLetters[(i * 11 + 3) % 24], i % 10);
}

std::string plant(std::size_t i) { return fmt::format("Plant-{}", static_cast<char>('A' + i)); }

std::string render_family(std::size_t family, std::size_t item, std::size_t plant_idx) {
    std::string q = kFamilies[family];
    text::replace_all(q, "{item}", item_code(item));
    text::replace_all(q, "{plant}", plant(plant_idx));
    return q;
}

struct SeedKey {
    std::size_t family;
    std::size_t item;
    std::size_t plant;
};

std::vector<SeedKey> seed_keys(std::size_t count, std::uint64_t seed) {
    std::vector<SeedKey> all;
    for (std::size_t f = 0; f < std::size(kFamilies); ++f)
        for (std::size_t i = 0; i < kItems; ++i)
            for (std::size_t p = 0; p < kPlants; ++p) all.push_back({f, i, p});
    if (count > all.size()) throw std::invalid_argument(fmt::format("at most {} synthetic seeds", all.size()));
    Rng rng(seed);
    rng.shuffle(all);
    all.resize(count);
    return all;
}

std::string strip_question_mark(std::string q) {
    while (!q.empty() && (q.back() == '?' || q.back() == ' ')) q.pop_back();
    return q;
}

std::string lower_first(std::string q) {
    if (!q.empty()) q[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(q[0])));
    return q;
}

// Every perturbation adds at least one word absent from all seed families.
std::string paraphrase(const SeedKey& k, Rng& rng) {
    const auto base = render_family(k.family, k.item, k.plant);
    switch (rng.below(5)) {
        case 0: return "Please " + lower_first(base);
        case 1: return strip_question_mark(base) + " right now";
        case 2: {
            static const std::pair<const char*, const char*> kLeads[] = {{"What is the", "Tell me the"},
                                                                          {"Show the", "Display the"},
                                                                          {"List", "Give me"},
                                                                          {"How many", "Kindly tell how many"},
                                                                          {"What was the", "Tell me the"}};
            for (const auto& [from, to] : kLeads) {
                if (base.rfind(from, 0) == 0) return to + base.substr(std::string(from).size());
            }
            return "Please " + lower_first(base);
        }
        case 3: {
            const auto other = (k.plant + 1 + rng.below(kPlants - 1)) % kPlants;
            return "Kindly " + lower_first(render_family(k.family, k.item, other));
        }
        default: {
            const auto other = (k.item + 1 + rng.below(kItems - 1)) % kItems;
            return strip_question_mark(render_family(k.family, other, k.plant)) + " quickly";
        }
    }
}

std::string novel_query(Rng& rng) {
    switch (rng.below(5)) {
        case 0: return fmt::format("Which vendors shipped late during quarter {} of {}?", 1 + rng.below(4), 2019 + rng.below(6));
        case 1: return fmt::format("Rank warehouses by dead inventory exposure for fiscal {}", 2019 + rng.below(6));
        case 2: return fmt::format("Forecast demand spikes across regions within {} weeks", 2 + rng.below(11));
        case 3: return fmt::format("Identify backorders older than {} days grouped per region", 10 + 5 * rng.below(17));
        default:
            return fmt::format("Summarize cycle count discrepancies among bins in zone {}{}",
                               static_cast<char>('A' + rng.below(6)), 1 + rng.below(9));
    }
}

}  // namespace

std::vector<SeedRecord> seed_corpus(std::size_t count, const DomainLexicon& lexicon, std::uint64_t seed) {
    MockIntentClassifier classifier(lexicon);
    MockCodeGenerator codegen;
    MockExecutor executor;
    MockSummarizer summarizer;

    std::vector<SeedRecord> out;
    out.reserve(count);
    for (const auto& k : seed_keys(count, seed)) {
        SeedRecord r;
        r.question = render_family(k.family, k.item, k.plant);
        const auto intent = classifier.classify(r.question);
        r.plan = plan_from_signature(intent.signature, lexicon.extract_slots(r.question));
        r.code = codegen.generate(CodeGenInput{r.question, r.plan, {}, std::nullopt, 0, {}});
        r.response = summarizer.summarize(r.question, executor.execute(r.code));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<QueryLogRecord> query_log(const std::vector<SeedRecord>& seeds, std::size_t count, LogShape shape,
                                      std::uint64_t seed) {
    if (seeds.empty() && count > 0) throw std::invalid_argument("query log generation needs seeds");
    const auto n_return = static_cast<std::size_t>(std::llround(shape.return_share * static_cast<double>(count)));
    const auto n_guide = static_cast<std::size_t>(std::llround(shape.guide_share * static_cast<double>(count)));
    if (n_return + n_guide > count) throw std::invalid_argument("log shares exceed 1");

    // Recover family/item/plant for each seed so paraphrases can swap values.
    std::map<std::string, SeedKey> by_question;
    for (std::size_t f = 0; f < std::size(kFamilies); ++f)
        for (std::size_t i = 0; i < kItems; ++i)
            for (std::size_t p = 0; p < kPlants; ++p) by_question.emplace(render_family(f, i, p), SeedKey{f, i, p});

    Rng rng(seed);
    std::vector<QueryLogRecord> out;
    out.reserve(count);
    for (std::size_t i = 0; i < n_return; ++i) {
        const auto& s = seeds[rng.below(seeds.size())];
        auto it = by_question.find(s.question);
        std::optional<std::string> intent;
        if (it != by_question.end()) intent = kFamilyIntents[it->second.family];
        out.push_back({s.question, MatchMode::Return, intent, std::nullopt});
    }
    for (std::size_t i = 0; i < n_guide; ++i) {
        const auto& s = seeds[rng.below(seeds.size())];
        auto it = by_question.find(s.question);
        if (it == by_question.end()) throw std::invalid_argument("paraphrases need seeds from seed_corpus()");
        QueryLogRecord r{paraphrase(it->second, rng), MatchMode::Guide, std::string(kFamilyIntents[it->second.family]),
                         std::nullopt};
        if (i % 40 == 0) r.fixture_id = "flaky_once";
        out.push_back(std::move(r));
    }
    while (out.size() < count) out.push_back({novel_query(rng), MatchMode::Generate, std::nullopt, std::nullopt});
    rng.shuffle(out);
    return out;
}

FixtureRegistry fixtures() {
    ExecutionResult failure{ExecStatus::Error, {}, {}, "KeyError: 'STOCK_VALUE'"};
    ExecutionResult timeout{ExecStatus::Timeout, {}, {}, "execution exceeded 30s"};
    ExecutionResult success;
    success.tables_out.push_back(DataTable{"result", {"metric", "value"}, {{"total", "48210.50"}, {"rows", "12"}}});
    success.text_out = "total = 48210.50; rows = 12";
    return {
        {"flaky_once", {failure, success}},
        {"fail_twice", {failure, timeout, success}},
        {"always_fails", {failure}},
        {"ok", {success}},
    };
}

}  // namespace synthetic
}  // namespace semcache
