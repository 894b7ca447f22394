// semcache: seed a cache, replay a query log through the mock pipeline, and
// print replay reports.
//
// Exit status: 0 success, 1 expected_mode mismatch, 2 input error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "semcache/replay.hpp"
#include "semcache/synthetic.hpp"
#include "semcache/text.hpp"

namespace fs = std::filesystem;
using namespace semcache;

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitInput = 2;

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

struct SynthArgs {
    fs::path out = "synthetic";
    std::size_t seeds = 1021;
    std::size_t queries = 1000;
};

int run_synth(const SynthArgs& a) {
    const DomainLexicon lexicon;
    const auto catalog = synthetic::schema();
    const auto corpus = synthetic::seed_corpus(a.seeds, lexicon);
    const auto log = synthetic::query_log(corpus, a.queries);

    open_output(a.out / "schema.json") << catalog.to_json().dump(2) << '\n';
    auto prompts = open_output(a.out / "prompts.jsonl");
    synthetic::repository(catalog).write(prompts);
    auto corpus_out = open_output(a.out / "corpus.jsonl");
    for (const auto& r : corpus) corpus_out << nlohmann::json(r).dump() << '\n';
    auto log_out = open_output(a.out / "log.jsonl");
    for (const auto& r : log) log_out << log_record_to_json(r).dump() << '\n';
    open_output(a.out / "fixtures.json") << fixtures_to_json(synthetic::fixtures()).dump(2) << '\n';
    fmt::print("wrote {} seeds and {} queries to {}\n", corpus.size(), log.size(), a.out.string());
    return 0;
}

struct SeedArgs {
    fs::path corpus;
    fs::path cache;
    fs::path schema;
    std::size_t dimension = 256;
};

int run_seed(const SeedArgs& a) {
    const auto catalog = SchemaCatalog::load(a.schema);
    const auto corpus = read_seed_corpus(a.corpus);
    CacheStore cache = fs::exists(a.cache) ? CacheStore::load(a.cache) : CacheStore(a.dimension);
    const DomainLexicon lexicon;
    const HashEmbedder embedder(cache.dimension());
    const auto n = seed_cache(corpus, cache, catalog, lexicon, embedder);
    cache.save(a.cache);
    fmt::print("seeded {} records; cache holds {} entries\n", n, cache.stats().entry_count);
    return 0;
}

struct ReplayArgs {
    fs::path log;
    fs::path cache;
    fs::path prompts;
    fs::path schema;
    fs::path fixtures;
    fs::path report_json;
    fs::path trace;
    double theta_return = 0.995;
    double theta_guide = 0.50;
    std::size_t k = 5;
    double boost_increment = 0.02;
    bool populate = false;
    bool update_cache = false;
    std::size_t workers = 1;
};

int run_replay(const ReplayArgs& a) {
    const auto catalog = SchemaCatalog::load(a.schema);
    const auto prompts = PromptRepository::load(a.prompts, catalog.table_names());
    const auto log = read_query_log(a.log);
    const FixtureRegistry fixtures = a.fixtures.empty() ? FixtureRegistry{} : fixtures_from_json(read_json(a.fixtures));
    auto cache = CacheStore::load(a.cache);

    ReplayConfig config;
    config.thresholds = Thresholds{a.theta_return, a.theta_guide};
    config.k = a.k;
    config.boost_increment = a.boost_increment;
    config.populate = a.populate;
    config.workers = a.workers;

    const auto result = replay(log, cache, prompts, catalog, fixtures, config);
    std::cout << format_report(result.report);
    if (!a.report_json.empty()) open_output(a.report_json) << report_to_json(result.report).dump(2) << '\n';
    if (!a.trace.empty()) {
        auto out = open_output(a.trace);
        for (const auto& t : result.trace) out << trace_to_json(t).dump() << '\n';
    }
    if (a.update_cache) cache.save(a.cache);
    return result.report.mismatches > 0 ? kExitMismatch : 0;
}

struct ReportArgs {
    fs::path report_json;
    fs::path trace;
};

int run_report(const ReportArgs& a) {
    if (a.report_json.empty() == a.trace.empty()) throw InputError("pass exactly one of --report-json or --trace");
    ReplayReport report;
    if (!a.trace.empty()) {
        std::ifstream in(a.trace);
        if (!in) throw InputError("cannot open " + a.trace.string());
        std::vector<TraceRecord> trace;
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            ++n;
            if (text::trim(line).empty()) continue;
            try {
                trace.push_back(trace_from_json(nlohmann::json::parse(line)));
            } catch (const std::exception& e) {
                throw InputError(e.what(), n);
            }
        }
        report = report_from_trace(trace);
    } else {
        report = report_from_json(read_json(a.report_json));
    }
    std::cout << format_report(report);
    return report.mismatches > 0 ? kExitMismatch : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semantic cache seeding and query-log replay"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic schema, prompts, corpus, log and fixtures");
    synth_cmd->add_option("--out", synth.out, "Output directory");
    synth_cmd->add_option("--seeds", synth.seeds, "Seed corpus size");
    synth_cmd->add_option("--queries", synth.queries, "Query log size");

    SeedArgs seed;
    auto* seed_cmd = app.add_subcommand("seed", "Embed, sign and insert a seed corpus");
    seed_cmd->add_option("--corpus", seed.corpus, "Seed corpus (JSONL)")->required()->check(CLI::ExistingFile);
    seed_cmd->add_option("--cache", seed.cache, "Cache file, created when missing")->required();
    seed_cmd->add_option("--schema", seed.schema, "Schema catalog (JSON)")->required()->check(CLI::ExistingFile);
    seed_cmd->add_option("--dimension", seed.dimension, "Embedding dimension for a new cache");

    ReplayArgs rep;
    auto* replay_cmd = app.add_subcommand("replay", "Replay a query log through the mock pipeline");
    replay_cmd->add_option("--log", rep.log, "Query log (JSONL)")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--cache", rep.cache, "Cache file")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--prompts", rep.prompts, "Prompt repository (JSONL)")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--schema", rep.schema, "Schema catalog (JSON)")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--fixtures", rep.fixtures, "Executor fixtures (JSON)")->check(CLI::ExistingFile);
    replay_cmd->add_option("--report-json", rep.report_json, "Write the report record here");
    replay_cmd->add_option("--trace", rep.trace, "Write the per-query decision trace (JSONL) here");
    replay_cmd->add_option("--theta-return", rep.theta_return, "Return threshold on s_base");
    replay_cmd->add_option("--theta-guide", rep.theta_guide, "Guide threshold on s_adj");
    replay_cmd->add_option("--k", rep.k, "Candidates retrieved per query")->check(CLI::PositiveNumber);
    replay_cmd->add_option("--boost-increment", rep.boost_increment, "Increment per boost source");
    replay_cmd->add_flag("--populate", rep.populate, "Insert successful Guide/Generate outcomes");
    replay_cmd->add_flag("--update-cache", rep.update_cache, "Save hit counts and new entries back to --cache");
    replay_cmd->add_option("--workers", rep.workers, "Worker threads")->check(CLI::PositiveNumber);

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Print a saved report, or recount one from a trace");
    report_cmd->add_option("--report-json", report.report_json, "Report record")->check(CLI::ExistingFile);
    report_cmd->add_option("--trace", report.trace, "Decision trace (JSONL)")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        if (*synth_cmd) return run_synth(synth);
        if (*seed_cmd) return run_seed(seed);
        if (*replay_cmd) return run_replay(rep);
        return run_report(report);
    } catch (const std::exception& e) {
        std::cerr << "semcache: " << e.what() << '\n';
        return kExitInput;
    }
}
