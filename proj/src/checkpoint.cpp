#include "semcache/checkpoint.hpp"

#include <fstream>
#include <stdexcept>
#include <thread>

#include "semcache/text.hpp"

namespace semcache {

void InMemoryCheckpointStore::put(const std::string& id, const nlohmann::json& state) {
    std::lock_guard lock(mutex_);
    records_[id] = state;
}

std::optional<nlohmann::json> InMemoryCheckpointStore::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find(id);
    if (it == records_.end()) return std::nullopt;
    return std::optional<nlohmann::json>(std::in_place, it->second);
}

std::size_t InMemoryCheckpointStore::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

FileCheckpointStore::FileCheckpointStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path FileCheckpointStore::path_for(const std::string& id) const {
    if (id.empty() || id.find_first_of("/\\") != std::string::npos || id.front() == '.')
        throw std::invalid_argument("invalid checkpoint id '" + id + "'");
    return dir_ / (id + ".json");
}

void FileCheckpointStore::put(const std::string& id, const nlohmann::json& state) {
    const auto target = path_for(id);
    auto tmp = target;
    tmp += ".tmp." + text::hex64(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
        nlohmann::json record{{"format", "semcache.checkpoint"}, {"version", kFormatVersion}, {"id", id}, {"state", state}};
        out << record.dump() << '\n';
        if (!out) throw std::runtime_error("write failed for checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

std::optional<nlohmann::json> FileCheckpointStore::get(const std::string& id) const {
    const auto path = path_for(id);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    nlohmann::json record;
    try {
        in >> record;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed checkpoint " + path.string() + ": " + e.what());
    }
    if (record.value("format", std::string{}) != "semcache.checkpoint" || record.value("version", -1) != kFormatVersion)
        throw InputError("unsupported checkpoint record " + path.string());
    return std::optional<nlohmann::json>(std::in_place, record.at("state"));
}

std::size_t FileCheckpointStore::size() const {
    std::size_t n = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir_)) {
        if (e.path().extension() == ".json") ++n;
    }
    return n;
}

}  // namespace semcache
