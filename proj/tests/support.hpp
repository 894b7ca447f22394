#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "semcache/cache_store.hpp"
#include "semcache/embedding.hpp"
#include "semcache/lexicon.hpp"
#include "semcache/mock_agents.hpp"
#include "semcache/signature.hpp"
#include "semcache/text.hpp"

namespace semcache::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(SEMCACHE_FIXTURES) / name;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("semcache_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline QuerySignature make_sig(std::string category, std::string qtype, std::string agg, std::string metric,
                               std::string grouping, std::vector<std::string> filters, std::string primary,
                               std::vector<std::string> joins = {}, std::vector<std::string> flags = {}) {
    SignatureFields f;
    f.semantic_category = std::move(category);
    f.query_type = std::move(qtype);
    f.aggregation = std::move(agg);
    f.primary_metric = std::move(metric);
    f.grouping = std::move(grouping);
    f.filter_types = std::move(filters);
    f.primary_table = std::move(primary);
    f.required_joins = std::move(joins);
    f.semantic_flags = std::move(flags);
    return QuerySignature(f);
}

inline const char* kReferenceQuestion = "What is the total stock value for item code ITEM-001-BB0 at Plant-A?";
inline const char* kCurrentQuestion = "Show me total stock value for item ITEM-001-NN0 at Plant-B";

inline EmbeddingVector unit(std::size_t dim, std::size_t axis) {
    std::vector<double> v(dim, 0.0);
    v[axis] = 1.0;
    return EmbeddingVector(std::move(v));
}

// Unit vector at cosine `c` from unit(dim, 0).
inline EmbeddingVector at_cosine(std::size_t dim, double c) {
    std::vector<double> v(dim, 0.0);
    v[0] = c;
    v[1] = std::sqrt(1.0 - c * c);
    return EmbeddingVector(std::move(v));
}

// The worked-example reference entry: signature, plan and code from the mocks.
inline CacheEntry reference_entry(const DomainLexicon& lexicon, EmbeddingVector embedding,
                                  const std::string& schema_hash = "hash-v1") {
    MockIntentClassifier classifier(lexicon);
    auto intent = classifier.classify(kReferenceQuestion);
    auto plan = plan_from_signature(intent.signature, lexicon.extract_slots(kReferenceQuestion));
    return make_cache_entry(entry_id_for(kReferenceQuestion, schema_hash), kReferenceQuestion, intent.signature,
                            std::move(embedding), plan, "# code", "Total stock value: $12,500.00", schema_hash, 1);
}

}  // namespace semcache::testing
