#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include "semcache/replay.hpp"
#include "semcache/text.hpp"
#include "support.hpp"

using namespace semcache;
using namespace semcache::testing;

namespace {

struct World {
    DomainLexicon lexicon;
    SchemaCatalog catalog = synthetic::schema();
    PromptRepository prompts = synthetic::repository(catalog);
    HashEmbedder embedder{256};
    std::vector<SeedRecord> corpus;
    CacheStore cache{256};

    explicit World(std::size_t seeds = 60) : corpus(synthetic::seed_corpus(seeds, lexicon)) {
        seed_cache(corpus, cache, catalog, lexicon, embedder);
    }

    ReplayResult run(const std::vector<QueryLogRecord>& log, ReplayConfig config = {}) {
        CacheStore copy(cache);
        return replay(log, copy, prompts, catalog, synthetic::fixtures(), config);
    }
};

int run_cli(const std::string& args) {
    const int rc = std::system((std::string(SEMCACHE_CLI) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("query log reader") {
    std::stringstream ok(
        "{\"query\":\"stock at Plant-A\",\"expected_mode\":\"guide\",\"fixture_id\":\"f\"}\n"
        "\n"
        "{\"query\":\"other\"}\n");
    const auto log = read_query_log(ok);
    REQUIRE(log.size() == 2);
    CHECK(log[0].expected_mode == MatchMode::Guide);
    CHECK(log[0].fixture_id == std::optional<std::string>("f"));
    CHECK_FALSE(log[1].expected_mode);

    for (const std::string bad : {"{\"query\":\"a\"}\n{\"query\": \n", "{\"query\":\"a\"}\n{\"query\":\"  \"}\n",
                                  "{\"query\":\"a\"}\n{\"query\":\"b\",\"expected_mode\":\"maybe\"}\n"}) {
        std::stringstream in(bad);
        try {
            read_query_log(in);
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(e.line() == 2);
        }
    }
}

TEST_CASE("unbound fixture names the record") {
    World w(5);
    std::vector<QueryLogRecord> log{{"Show the on-hand quantity of ITEM-002-CC1 in Plant-D", {}, {}, "ghost"}};
    CHECK_THROWS_WITH_AS(w.run(log), doctest::Contains("record 1"), InputError);
    CHECK_THROWS_WITH_AS(w.run(log), doctest::Contains("ghost"), InputError);
}

TEST_CASE("seeding counts records and is idempotent") {
    World w(40);
    CHECK(w.cache.stats().entry_count == 40);
    CHECK(seed_cache(w.corpus, w.cache, w.catalog, w.lexicon, w.embedder) == 40);
    CHECK(w.cache.stats().entry_count == 40);
    CHECK(seed_cache({}, w.cache, w.catalog, w.lexicon, w.embedder) == 0);

    std::stringstream bad("{\"question\":\"q\",\"plan\":[],\"response\":\"r\"}\n{\"plan\":[]}\n");
    try {
        read_seed_corpus(bad);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("trivial logs") {
    World w(10);
    const auto empty = w.run({});
    CHECK(empty.report.total == 0);
    CHECK(empty.report.failures == 0);
    CHECK(empty.report.utilization_pct == 0.0);

    const auto one = w.run({{w.corpus[3].question, MatchMode::Return, {}, {}}});
    CHECK(one.report.mode_counts.at(MatchMode::Return) == 1);
    CHECK(one.report.utilization_pct == 100.0);
    CHECK(one.report.mismatches == 0);
    CHECK(one.trace[0].response == w.corpus[3].response);
}

TEST_CASE("report agrees with a recount of the trace") {
    World w(120);
    const auto log = synthetic::query_log(w.corpus, 200);
    const auto r = w.run(log);
    std::map<MatchMode, std::size_t> modes;
    std::size_t hist = 0, returns_or_guides = 0, mismatches = 0;
    for (const auto& t : r.trace) {
        ++modes[t.mode];
        if (t.mode != MatchMode::Generate) ++returns_or_guides;
        if (t.expected_mode && *t.expected_mode != t.mode) ++mismatches;
    }
    for (auto n : r.report.histogram) hist += n;
    CHECK(hist == r.report.total);
    CHECK(r.report.total == log.size());
    for (const auto& [m, n] : r.report.mode_counts) CHECK(modes[m] == n);
    CHECK(r.report.utilization_pct == doctest::Approx(100.0 * returns_or_guides / log.size()));
    CHECK(r.report.mismatches == mismatches);
    CHECK(r.report.mismatches == 0);
}

TEST_CASE("replays are deterministic and independent of worker count") {
    World w(120);
    const auto log = synthetic::query_log(w.corpus, 150);
    const auto a = w.run(log);
    const auto b = w.run(log);
    ReplayConfig parallel;
    parallel.workers = 4;
    const auto c = w.run(log, parallel);
    CHECK(a.report == b.report);
    CHECK(a.trace == b.trace);
    CHECK(a.report == c.report);
    CHECK(a.trace == c.trace);
    CHECK(format_report(a.report) == format_report(c.report));
}

TEST_CASE("populate turns repeated novel queries into returns") {
    World w(10);
    const std::string q = "Identify backorders older than 45 days grouped per region";
    ReplayConfig config;
    config.populate = true;
    const auto r = w.run({{q, MatchMode::Generate, {}, {}}, {q, MatchMode::Return, {}, {}}}, config);
    CHECK(r.trace[0].mode == MatchMode::Generate);
    CHECK(r.trace[1].mode == MatchMode::Return);
    CHECK(r.report.mismatches == 0);
}

TEST_CASE("stale entries are invalidated before replay") {
    World w(10);
    CacheStore stale(256);
    for (auto e : w.cache.live_entries()) {
        e.schema_hash = "old";
        stale.insert(e);
    }
    const auto r = replay({{w.corpus[0].question, {}, {}, {}}}, stale, w.prompts, w.catalog, {}, {});
    CHECK(r.report.invalidated == 10);
    CHECK(r.trace[0].mode == MatchMode::Generate);
}

TEST_CASE("report json round trip and golden output") {
    World w(30);
    const auto log = synthetic::query_log(w.corpus, 40);
    const auto r = w.run(log).report;
    CHECK(report_from_json(report_to_json(r)) == r);
    CHECK(format_report(r) == read_file(fixture_path("replay_report.txt")));
    CHECK(report_to_json(r) == nlohmann::json::parse(read_file(fixture_path("replay_report.json"))));
}

TEST_CASE("cli verbs and exit codes") {
    const auto dir = scratch_dir("cli");
    const auto d = dir.string();
    REQUIRE(run_cli("synth --out " + d + " --seeds 50 --queries 60") == 0);
    REQUIRE(run_cli("seed --corpus " + d + "/corpus.jsonl --cache " + d + "/cache.jsonl --schema " + d +
                    "/schema.json") == 0);
    CHECK(CacheStore::load(dir / "cache.jsonl").stats().entry_count == 50);
    const std::string common = " --cache " + d + "/cache.jsonl --prompts " + d + "/prompts.jsonl --schema " + d +
                               "/schema.json --fixtures " + d + "/fixtures.json";
    CHECK(run_cli("replay --log " + d + "/log.jsonl" + common + " --report-json " + d + "/report.json --trace " +
                  d + "/trace.jsonl") == 0);
    CHECK(run_cli("report --report-json " + d + "/report.json") == 0);
    CHECK(run_cli("report --trace " + d + "/trace.jsonl") == 0);

    std::ofstream(dir / "mismatch.jsonl") << "{\"query\":\"Forecast demand spikes across regions within 4 weeks\","
                                             "\"expected_mode\":\"return\"}\n";
    CHECK(run_cli("replay --log " + d + "/mismatch.jsonl" + common) == 1);

    std::ofstream(dir / "broken.jsonl") << "{\"query\":\"ok\"}\n{not json\n";
    CHECK(run_cli("replay --log " + d + "/broken.jsonl" + common) == 2);
    CHECK(run_cli("replay --log " + d + "/missing.jsonl" + common) == 2);
    CHECK(run_cli("replay --log " + d + "/log.jsonl" + common + " --theta-guide 0.999") == 2);
    CHECK(run_cli("frobnicate") == 2);
}
