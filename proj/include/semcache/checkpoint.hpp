#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace semcache {

/// Id-addressable storage of serialized pipeline states. Writers with
/// distinct ids may run concurrently.
class CheckpointStore {
public:
    virtual ~CheckpointStore() = default;
    virtual void put(const std::string& id, const nlohmann::json& state) = 0;
    virtual std::optional<nlohmann::json> get(const std::string& id) const = 0;
    virtual std::size_t size() const = 0;
};

class InMemoryCheckpointStore final : public CheckpointStore {
public:
    void put(const std::string& id, const nlohmann::json& state) override;
    std::optional<nlohmann::json> get(const std::string& id) const override;
    std::size_t size() const override;

private:
    mutable std::mutex mutex_;
    std::map<std::string, nlohmann::json> records_;
};

/// One file per checkpoint, `<dir>/<id>.json`, written via rename so readers
/// never see a partial record:
///   {"format": "semcache.checkpoint", "version": 1, "id": "...", "state": {...}}
class FileCheckpointStore final : public CheckpointStore {
public:
    static constexpr int kFormatVersion = 1;

    explicit FileCheckpointStore(std::filesystem::path dir);

    void put(const std::string& id, const nlohmann::json& state) override;
    std::optional<nlohmann::json> get(const std::string& id) const override;
    std::size_t size() const override;

private:
    std::filesystem::path path_for(const std::string& id) const;

    std::filesystem::path dir_;
};

}  // namespace semcache
