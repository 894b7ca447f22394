#include "semcache/replay.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "semcache/checkpoint.hpp"
#include "semcache/pipeline.hpp"
#include "semcache/text.hpp"

namespace semcache {

namespace {

template <typename T, typename Parse>
std::vector<T> read_lines(std::istream& in, Parse parse) {
    std::vector<T> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(parse(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw InputError(e.what(), n);
        }
    }
    return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return in;
}

// Replay never resumes, so checkpoints are dropped.
class DiscardCheckpoints final : public CheckpointStore {
public:
    void put(const std::string&, const nlohmann::json&) override {}
    std::optional<nlohmann::json> get(const std::string&) const override { return std::nullopt; }
    std::size_t size() const override { return 0; }
};

constexpr MatchMode kModes[] = {MatchMode::Return, MatchMode::Guide, MatchMode::Generate};

}  // namespace

std::vector<QueryLogRecord> read_query_log(std::istream& in) {
    return read_lines<QueryLogRecord>(in, [](const nlohmann::json& j) { return log_record_from_json(j); });
}

std::vector<QueryLogRecord> read_query_log(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_query_log(in);
}

std::vector<SeedRecord> read_seed_corpus(std::istream& in) {
    return read_lines<SeedRecord>(in, [](const nlohmann::json& j) {
        auto r = j.get<SeedRecord>();
        if (text::trim(r.question).empty()) throw std::invalid_argument("question is empty");
        return r;
    });
}

std::vector<SeedRecord> read_seed_corpus(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_seed_corpus(in);
}

void write_jsonl(std::ostream& out, const std::vector<nlohmann::json>& records) {
    for (const auto& r : records) out << r.dump() << '\n';
}

std::size_t seed_cache(const std::vector<SeedRecord>& corpus, CacheStore& cache, const SchemaCatalog& catalog,
                       const DomainLexicon& lexicon, const Embedder& embedder) {
    MockIntentClassifier classifier(lexicon);
    const auto hash = catalog.schema_hash();
    std::int64_t clock = 0;
    for (const auto& r : corpus) {
        auto intent = classifier.classify(r.question);
        cache.insert(make_cache_entry(entry_id_for(r.question, hash), r.question, std::move(intent.signature),
                                      embedder.embed(r.question), r.plan, r.code, r.response, hash, clock++));
    }
    return corpus.size();
}

nlohmann::json trace_to_json(const TraceRecord& t) {
    nlohmann::json j{{"index", t.index},
                     {"query", t.query},
                     {"mode", to_string(t.mode)},
                     {"guard_filtered", t.guard_filtered},
                     {"s_base", t.s_base},
                     {"s_adj", t.s_adj},
                     {"candidate_id", nullptr},
                     {"expected_mode", nullptr},
                     {"ok", t.ok},
                     {"retry_count", t.retry_count},
                     {"full_tokens", t.full_tokens},
                     {"filtered_tokens", t.filtered_tokens},
                     {"response", t.response}};
    if (t.candidate_id) j["candidate_id"] = *t.candidate_id;
    if (t.expected_mode) j["expected_mode"] = to_string(*t.expected_mode);
    return j;
}

TraceRecord trace_from_json(const nlohmann::json& j) {
    TraceRecord t;
    t.index = j.at("index").get<std::size_t>();
    t.query = j.at("query").get<std::string>();
    t.mode = mode_from_string(j.at("mode").get<std::string>());
    t.guard_filtered = j.at("guard_filtered").get<bool>();
    t.s_base = j.at("s_base").get<double>();
    t.s_adj = j.at("s_adj").get<double>();
    if (!j.at("candidate_id").is_null()) t.candidate_id = j.at("candidate_id").get<std::string>();
    if (!j.at("expected_mode").is_null()) t.expected_mode = mode_from_string(j.at("expected_mode").get<std::string>());
    t.ok = j.at("ok").get<bool>();
    t.retry_count = j.at("retry_count").get<int>();
    t.full_tokens = j.at("full_tokens").get<std::size_t>();
    t.filtered_tokens = j.at("filtered_tokens").get<std::size_t>();
    t.response = j.at("response").get<std::string>();
    return t;
}

std::size_t histogram_bin(double s_base) {
    std::size_t bin = 0;
    for (std::size_t i = 1; i < kHistogramLower.size(); ++i) {
        if (s_base >= kHistogramLower[i]) bin = i;
    }
    return bin;
}

ReplayReport report_from_trace(const std::vector<TraceRecord>& trace) {
    ReplayReport r;
    for (auto m : kModes) {
        r.mode_counts[m] = 0;
        r.expected_counts[m] = 0;
    }
    r.total = trace.size();
    for (const auto& t : trace) {
        ++r.mode_counts[t.mode];
        if (t.guard_filtered) ++r.guard_filtered;
        ++r.histogram[histogram_bin(t.s_base)];
        r.token_reduction += ReductionReport::from_counts(t.full_tokens, t.filtered_tokens);
        if (!t.ok) ++r.failures;
        if (t.expected_mode) {
            ++r.expected_counts[*t.expected_mode];
            if (*t.expected_mode != t.mode) ++r.mismatches;
        }
    }
    if (r.total > 0) {
        r.utilization_pct = 100.0 * static_cast<double>(r.mode_counts[MatchMode::Return] + r.mode_counts[MatchMode::Guide]) /
                            static_cast<double>(r.total);
    }
    return r;
}

nlohmann::json report_to_json(const ReplayReport& r) {
    nlohmann::json modes = nlohmann::json::object();
    nlohmann::json expected = nlohmann::json::object();
    for (auto m : kModes) {
        modes[to_string(m)] = r.mode_counts.count(m) ? r.mode_counts.at(m) : 0;
        expected[to_string(m)] = r.expected_counts.count(m) ? r.expected_counts.at(m) : 0;
    }
    return nlohmann::json{{"format", "semcache.report"},
                          {"version", 1},
                          {"total", r.total},
                          {"mode_counts", modes},
                          {"guard_filtered", r.guard_filtered},
                          {"utilization_pct", r.utilization_pct},
                          {"similarity_histogram", r.histogram},
                          {"token_reduction",
                           {{"full_tokens", r.token_reduction.full_tokens},
                            {"filtered_tokens", r.token_reduction.filtered_tokens},
                            {"reduction_pct", r.token_reduction.reduction_pct}}},
                          {"failures", r.failures},
                          {"expected_counts", expected},
                          {"mismatches", r.mismatches},
                          {"invalidated", r.invalidated}};
}

ReplayReport report_from_json(const nlohmann::json& j) {
    if (j.value("format", std::string{}) != "semcache.report" || j.value("version", 0) != 1)
        throw InputError("not a version 1 semcache report");
    ReplayReport r;
    r.total = j.at("total").get<std::size_t>();
    for (auto m : kModes) {
        r.mode_counts[m] = j.at("mode_counts").at(to_string(m)).get<std::size_t>();
        r.expected_counts[m] = j.at("expected_counts").at(to_string(m)).get<std::size_t>();
    }
    r.guard_filtered = j.at("guard_filtered").get<std::size_t>();
    r.utilization_pct = j.at("utilization_pct").get<double>();
    r.histogram = j.at("similarity_histogram").get<std::array<std::size_t, 6>>();
    const auto& tr = j.at("token_reduction");
    r.token_reduction.full_tokens = tr.at("full_tokens").get<std::size_t>();
    r.token_reduction.filtered_tokens = tr.at("filtered_tokens").get<std::size_t>();
    r.token_reduction.reduction_pct = tr.at("reduction_pct").get<double>();
    r.failures = j.at("failures").get<std::size_t>();
    r.mismatches = j.at("mismatches").get<std::size_t>();
    r.invalidated = j.at("invalidated").get<std::size_t>();
    return r;
}

std::string format_report(const ReplayReport& r) {
    static constexpr const char* kBins[] = {"[0.00, 0.30)", "[0.30, 0.50)", "[0.50, 0.70)",
                                            "[0.70, 0.90)", "[0.90, 0.99)", "[0.99, 1.00]"};
    auto share = [&](std::size_t n) {
        return r.total == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(r.total);
    };
    std::string out;
    out += fmt::format("{:<22}{:>10}\n", "queries", r.total);
    out += fmt::format("{:<22}{:>10}{:>10}{:>10}\n", "mode", "count", "share", "expected");
    for (auto m : kModes) {
        const auto n = r.mode_counts.count(m) ? r.mode_counts.at(m) : 0;
        const auto e = r.expected_counts.count(m) ? r.expected_counts.at(m) : 0;
        out += fmt::format("  {:<20}{:>10}{:>9.1f}%{:>10}\n", to_string(m), n, share(n), e);
    }
    out += fmt::format("  {:<20}{:>10}\n", "guard_filtered", r.guard_filtered);
    out += fmt::format("{:<22}{:>9.1f}%\n", "utilization", r.utilization_pct);
    out += fmt::format("{:<22}{:>10}\n", "s_base histogram", "count");
    for (std::size_t i = 0; i < r.histogram.size(); ++i)
        out += fmt::format("  {:<20}{:>10}\n", kBins[i], r.histogram[i]);
    out += fmt::format("{:<22}{:>10}\n", "full tokens", r.token_reduction.full_tokens);
    out += fmt::format("{:<22}{:>10}\n", "filtered tokens", r.token_reduction.filtered_tokens);
    out += fmt::format("{:<22}{:>9.1f}%\n", "token reduction", 100.0 * r.token_reduction.reduction_pct);
    out += fmt::format("{:<22}{:>10}\n", "failures", r.failures);
    out += fmt::format("{:<22}{:>10}\n", "mismatches", r.mismatches);
    out += fmt::format("{:<22}{:>10}\n", "invalidated", r.invalidated);
    return out;
}

ReplayResult replay(const std::vector<QueryLogRecord>& log, CacheStore& cache, const PromptRepository& prompts,
                    const SchemaCatalog& catalog, const FixtureRegistry& fixtures, const ReplayConfig& config) {
    config.thresholds.validate();
    if (config.k == 0) throw std::invalid_argument("k must be positive");
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto& f = log[i].fixture_id;
        if (f && *f != kDefaultFixture && !fixtures.count(*f))
            throw InputError(fmt::format("record {} (\"{}\") binds unknown fixture '{}'", i + 1, log[i].query, *f),
                             i + 1);
    }

    auto lex_config = config.lexicon;
    if (config.boost_increment) {
        const double b = *config.boost_increment;
        if (!(b >= 0.0 && b <= 0.99)) throw std::invalid_argument("boost increment must lie in [0, 0.99]");
        lex_config.increments = BoostIncrements{b, b, b, b};
    }
    const DomainLexicon lexicon(std::move(lex_config));
    const HashEmbedder embedder(cache.dimension());
    const auto mocks = make_mock_suite(lexicon, fixtures);
    const auto full_planner = assemble_full(prompts, Audience::Planner, catalog).token_count;

    const auto invalidated = cache.invalidate_by_schema(catalog.schema_hash());

    PipelineConfig pc;
    pc.match = MatchConfig{config.thresholds, config.k, {}};
    pc.max_retries = config.max_retries;
    pc.populate = config.populate;
    std::atomic<std::int64_t> clock{0};
    for (const auto& e : cache.live_entries()) clock = std::max<std::int64_t>(clock.load(), e.created_at + 1);
    pc.clock = [&clock] { return clock.fetch_add(1); };

    std::vector<TraceRecord> trace(log.size());
    auto process = [&](Pipeline& pipeline, std::size_t i) {
        const auto& rec = log[i];
        RunOptions opts;
        if (rec.fixture_id) opts.extensions["fixture_id"] = *rec.fixture_id;
        auto result = pipeline.run(rec.query, opts);
        pipeline.record_outcome(result.state);

        const auto& s = result.state;
        TraceRecord t;
        t.index = i;
        t.query = rec.query;
        t.expected_mode = rec.expected_mode;
        t.guard_filtered = s.guard_verdict == GuardVerdict::OffDomain;
        if (s.match) {
            t.mode = s.match->mode;
            t.s_base = s.match->s_base;
            t.s_adj = s.match->s_adj;
            if (s.match->candidate) t.candidate_id = s.match->candidate->id;
        }
        t.ok = s.succeeded();
        t.retry_count = s.retry_count;
        if (!t.guard_filtered && t.mode != MatchMode::Return) {
            t.full_tokens = full_planner;
            t.filtered_tokens = assemble_for_tables(prompts, Audience::Planner, s.tables, catalog).token_count;
        }
        t.response = result.response;
        trace[i] = std::move(t);
    };

    const std::size_t workers = config.populate ? 1 : std::max<std::size_t>(1, std::min(config.workers, log.size()));
    if (workers <= 1) {
        DiscardCheckpoints checkpoints;
        Pipeline pipeline(mocks.suite(), cache, embedder, lexicon, prompts, catalog, checkpoints, pc);
        for (std::size_t i = 0; i < log.size(); ++i) process(pipeline, i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                DiscardCheckpoints checkpoints;
                Pipeline pipeline(mocks.suite(), cache, embedder, lexicon, prompts, catalog, checkpoints, pc);
                for (std::size_t i = next++; i < log.size(); i = next++) {
                    try {
                        process(pipeline, i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        next = log.size();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }

    ReplayResult out;
    out.report = report_from_trace(trace);
    out.report.invalidated = invalidated;
    out.trace = std::move(trace);
    return out;
}

}  // namespace semcache
