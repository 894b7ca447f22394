#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semcache/embedding.hpp"
#include "semcache/signature.hpp"

namespace semcache {

struct CacheEntry {
    std::string id;
    std::string question;
    QuerySignature signature;
    std::string similarity_key;  // always build_similarity_key(signature)
    EmbeddingVector embedding;
    std::vector<std::string> plan;
    std::string code;
    std::string response;
    std::string schema_hash;
    std::int64_t created_at = 0;  // ms since epoch, or a logical clock
    std::uint64_t return_hits = 0;
    std::uint64_t guide_hits = 0;

    friend bool operator==(const CacheEntry&, const CacheEntry&) = default;
};

CacheEntry make_cache_entry(std::string id, std::string question, QuerySignature signature, EmbeddingVector embedding,
                            std::vector<std::string> plan, std::string code, std::string response,
                            std::string schema_hash, std::int64_t created_at);

// Stable id derived from the normalized question and schema hash.
std::string entry_id_for(const std::string& question, const std::string& schema_hash);

nlohmann::json entry_to_json(const CacheEntry& e);
// Throws InputError when fields are missing or the similarity key disagrees with the signature.
CacheEntry entry_from_json(const nlohmann::json& j);

struct StoreStats {
    std::size_t entry_count = 0;  // live entries
    std::uint64_t return_hits_total = 0;
    std::uint64_t guide_hits_total = 0;
    std::size_t invalidated_count = 0;

    friend bool operator==(const StoreStats&, const StoreStats&) = default;
};

struct ScoredEntry {
    CacheEntry entry;
    double s_base = 0.0;
};

struct StoreOptions {
    // Oldest-first removal once exceeded. Unbounded when absent.
    std::optional<std::size_t> max_entries;
};

/// Exhaustive-search semantic cache. One writer at a time, any number of
/// concurrent readers; readers always see a consistent snapshot.
///
/// Invalidation marks entries rather than deleting them: marked entries stay
/// in the file and in stats but never surface from top_k().
class CacheStore {
public:
    static constexpr int kFormatVersion = 1;

    explicit CacheStore(std::size_t dimension, StoreOptions options = {});
    CacheStore(const CacheStore& other);
    CacheStore& operator=(const CacheStore&) = delete;

    std::size_t dimension() const noexcept { return dimension_; }

    // Replaces any live entry with the same normalized question and schema hash.
    std::string insert(CacheEntry entry);
    std::optional<CacheEntry> get(const std::string& id) const;
    bool is_invalidated(const std::string& id) const;

    // Descending cosine; ties go to newer created_at, then smaller id.
    std::vector<ScoredEntry> top_k(const EmbeddingVector& query, std::size_t k) const;

    // Marks every live entry whose hash differs; returns how many were newly marked.
    std::size_t invalidate_by_schema(const std::string& current_hash);

    bool record_return_hit(const std::string& id);
    bool record_guide_hit(const std::string& id);

    StoreStats stats() const;
    std::vector<CacheEntry> live_entries() const;

    void write(std::ostream& out) const;
    static CacheStore read(std::istream& in, StoreOptions options = {});
    void save(const std::filesystem::path& path) const;
    static CacheStore load(const std::filesystem::path& path, StoreOptions options = {});

private:
    struct Slot {
        CacheEntry entry;
        bool invalidated = false;
    };

    void reindex_locked();
    void evict_locked();
    std::string dedup_key(const CacheEntry& e) const;

    std::size_t dimension_;
    StoreOptions options_;
    mutable std::shared_mutex mutex_;
    std::vector<Slot> slots_;
    std::map<std::string, std::size_t> by_id_;
    std::map<std::string, std::size_t> by_question_;  // live entries only
};

}  // namespace semcache
