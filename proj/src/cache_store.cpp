#include "semcache/cache_store.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "semcache/text.hpp"

namespace semcache {

CacheEntry make_cache_entry(std::string id, std::string question, QuerySignature signature, EmbeddingVector embedding,
                            std::vector<std::string> plan, std::string code, std::string response,
                            std::string schema_hash, std::int64_t created_at) {
    auto key = build_similarity_key(signature);
    return CacheEntry{std::move(id),
                      std::move(question),
                      std::move(signature),
                      std::move(key),
                      std::move(embedding),
                      std::move(plan),
                      std::move(code),
                      std::move(response),
                      std::move(schema_hash),
                      created_at,
                      0,
                      0};
}

std::string entry_id_for(const std::string& question, const std::string& schema_hash) {
    return "q" + text::hex64(text::fnv1a64(text::normalize_question(question) + "\x1f" + schema_hash));
}

nlohmann::json entry_to_json(const CacheEntry& e) {
    return nlohmann::json{{"id", e.id},
                          {"question", e.question},
                          {"signature", e.signature},
                          {"similarity_key", e.similarity_key},
                          {"embedding", e.embedding.values()},
                          {"plan", e.plan},
                          {"code", e.code},
                          {"response", e.response},
                          {"schema_hash", e.schema_hash},
                          {"created_at", e.created_at},
                          {"return_hits", e.return_hits},
                          {"guide_hits", e.guide_hits}};
}

CacheEntry entry_from_json(const nlohmann::json& j) {
    try {
        auto sig = signature_from_json(j.at("signature"));
        auto entry = make_cache_entry(j.at("id").get<std::string>(), j.at("question").get<std::string>(), sig,
                                      EmbeddingVector(j.at("embedding").get<std::vector<double>>()),
                                      j.at("plan").get<std::vector<std::string>>(), j.at("code").get<std::string>(),
                                      j.at("response").get<std::string>(), j.at("schema_hash").get<std::string>(),
                                      j.at("created_at").get<std::int64_t>());
        entry.return_hits = j.value("return_hits", std::uint64_t{0});
        entry.guide_hits = j.value("guide_hits", std::uint64_t{0});
        if (j.contains("similarity_key") && j.at("similarity_key").get<std::string>() != entry.similarity_key)
            throw InputError("similarity_key does not match signature for entry '" + entry.id + "'");
        if (entry.id.empty()) throw InputError("entry id is empty");
        return entry;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad cache entry: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("bad cache entry: ") + e.what());
    }
}

CacheStore::CacheStore(std::size_t dimension, StoreOptions options) : dimension_(dimension), options_(options) {
    if (dimension_ == 0) throw std::invalid_argument("store dimension must be positive");
}

CacheStore::CacheStore(const CacheStore& other) : dimension_(other.dimension_), options_(other.options_) {
    std::shared_lock lock(other.mutex_);
    slots_ = other.slots_;
    by_id_ = other.by_id_;
    by_question_ = other.by_question_;
}

std::string CacheStore::dedup_key(const CacheEntry& e) const {
    return text::normalize_question(e.question) + "\x1f" + e.schema_hash;
}

void CacheStore::reindex_locked() {
    by_id_.clear();
    by_question_.clear();
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        by_id_[slots_[i].entry.id] = i;
        if (!slots_[i].invalidated) by_question_[dedup_key(slots_[i].entry)] = i;
    }
}

void CacheStore::evict_locked() {
    if (!options_.max_entries) return;
    while (slots_.size() > *options_.max_entries) {
        auto oldest = std::min_element(slots_.begin(), slots_.end(), [](const Slot& a, const Slot& b) {
            if (a.entry.created_at != b.entry.created_at) return a.entry.created_at < b.entry.created_at;
            return a.entry.id < b.entry.id;
        });
        slots_.erase(oldest);
    }
    reindex_locked();
}

std::string CacheStore::insert(CacheEntry entry) {
    if (entry.embedding.dimension() != dimension_)
        throw std::invalid_argument("entry embedding dimension " + std::to_string(entry.embedding.dimension()) +
                                    " does not match store dimension " + std::to_string(dimension_));
    if (entry.id.empty()) throw std::invalid_argument("entry id is empty");
    entry.similarity_key = build_similarity_key(entry.signature);

    std::unique_lock lock(mutex_);
    const auto key = dedup_key(entry);
    auto dup = by_question_.find(key);
    auto same_id = by_id_.find(entry.id);
    if (same_id != by_id_.end() && (dup == by_question_.end() || same_id->second != dup->second))
        throw std::invalid_argument("cache entry id '" + entry.id + "' already in use");

    auto id = entry.id;
    if (dup != by_question_.end()) {
        auto& slot = slots_[dup->second];
        by_id_.erase(slot.entry.id);
        slot.entry = std::move(entry);
        by_id_[id] = dup->second;
    } else {
        slots_.push_back(Slot{std::move(entry), false});
        by_id_[id] = slots_.size() - 1;
        by_question_[key] = slots_.size() - 1;
    }
    evict_locked();
    return id;
}

std::optional<CacheEntry> CacheStore::get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return slots_[it->second].entry;
}

bool CacheStore::is_invalidated(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = by_id_.find(id);
    return it != by_id_.end() && slots_[it->second].invalidated;
}

std::vector<ScoredEntry> CacheStore::top_k(const EmbeddingVector& query, std::size_t k) const {
    if (query.dimension() != dimension_)
        throw std::invalid_argument("query embedding dimension " + std::to_string(query.dimension()) +
                                    " does not match store dimension " + std::to_string(dimension_));
    if (k == 0) throw std::invalid_argument("top_k requires k >= 1");

    std::shared_lock lock(mutex_);
    std::vector<std::pair<double, const Slot*>> scored;
    scored.reserve(slots_.size());
    for (const auto& slot : slots_) {
        if (slot.invalidated) continue;
        scored.emplace_back(cosine_similarity(query, slot.entry.embedding), &slot);
    }
    auto better = [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        if (a.second->entry.created_at != b.second->entry.created_at)
            return a.second->entry.created_at > b.second->entry.created_at;
        return a.second->entry.id < b.second->entry.id;
    };
    const auto n = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);

    std::vector<ScoredEntry> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({scored[i].second->entry, scored[i].first});
    return out;
}

std::size_t CacheStore::invalidate_by_schema(const std::string& current_hash) {
    std::unique_lock lock(mutex_);
    std::size_t count = 0;
    for (auto& slot : slots_) {
        if (!slot.invalidated && slot.entry.schema_hash != current_hash) {
            slot.invalidated = true;
            ++count;
        }
    }
    if (count) reindex_locked();
    return count;
}

bool CacheStore::record_return_hit(const std::string& id) {
    std::unique_lock lock(mutex_);
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return false;
    ++slots_[it->second].entry.return_hits;
    return true;
}

bool CacheStore::record_guide_hit(const std::string& id) {
    std::unique_lock lock(mutex_);
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return false;
    ++slots_[it->second].entry.guide_hits;
    return true;
}

StoreStats CacheStore::stats() const {
    std::shared_lock lock(mutex_);
    StoreStats s;
    for (const auto& slot : slots_) {
        if (slot.invalidated)
            ++s.invalidated_count;
        else
            ++s.entry_count;
        s.return_hits_total += slot.entry.return_hits;
        s.guide_hits_total += slot.entry.guide_hits;
    }
    return s;
}

std::vector<CacheEntry> CacheStore::live_entries() const {
    std::shared_lock lock(mutex_);
    std::vector<CacheEntry> out;
    for (const auto& slot : slots_) {
        if (!slot.invalidated) out.push_back(slot.entry);
    }
    return out;
}

void CacheStore::write(std::ostream& out) const {
    std::shared_lock lock(mutex_);
    nlohmann::json header{{"format", "semcache.cache"},
                          {"version", kFormatVersion},
                          {"dimension", dimension_},
                          {"entries", slots_.size()}};
    out << header.dump() << '\n';
    for (const auto& slot : slots_) {
        auto j = entry_to_json(slot.entry);
        j["invalidated"] = slot.invalidated;
        out << j.dump() << '\n';
    }
}

CacheStore CacheStore::read(std::istream& in, StoreOptions options) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("missing header", 1);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed header: ") + e.what(), 1);
    }
    if (!header.is_object() || header.value("format", std::string{}) != "semcache.cache")
        throw InputError("not a semcache cache file", 1);
    const int version = header.value("version", -1);
    if (version != kFormatVersion)
        throw InputError("unsupported cache format version " + std::to_string(version) + " (expected " +
                             std::to_string(kFormatVersion) + ")",
                         1);
    const auto dimension = header.value("dimension", std::size_t{0});
    const auto expected = header.value("entries", std::size_t{0});
    if (dimension == 0) throw InputError("header dimension must be positive", 1);

    CacheStore store(dimension, options);
    std::size_t line_no = 1;
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            auto entry = entry_from_json(j);
            if (entry.embedding.dimension() != dimension) throw InputError("embedding dimension mismatch");
            if (store.by_id_.count(entry.id)) throw InputError("duplicate entry id '" + entry.id + "'");
            store.slots_.push_back(Slot{std::move(entry), j.value("invalidated", false)});
            ++seen;
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("malformed record: ") + e.what(), line_no);
        } catch (const std::exception& e) {
            throw InputError(e.what(), line_no);
        }
        store.by_id_[store.slots_.back().entry.id] = store.slots_.size() - 1;
    }
    if (seen != expected)
        throw InputError("expected " + std::to_string(expected) + " records, found " + std::to_string(seen), line_no);
    store.reindex_locked();
    return store;
}

void CacheStore::save(const std::filesystem::path& path) const {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw InputError("cannot write cache file " + tmp.string());
        write(out);
        if (!out) throw InputError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

CacheStore CacheStore::load(const std::filesystem::path& path, StoreOptions options) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open cache file " + path.string());
    return read(in, options);
}

}  // namespace semcache
