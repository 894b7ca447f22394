#include "semcache/schema.hpp"

#include <algorithm>
#include <fstream>

#include "semcache/text.hpp"

namespace semcache {

SchemaCatalog::SchemaCatalog(std::map<std::string, TableInfo> tables) {
    for (auto& [name, info] : tables) {
        auto key = text::normalize_table(name);
        if (key.empty()) throw InputError("schema table name is empty");
        if (!tables_.emplace(key, std::move(info)).second) throw InputError("schema table '" + key + "' defined twice");
    }
}

SchemaCatalog SchemaCatalog::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("tables") || !j.at("tables").is_object())
        throw InputError("schema must be an object with a 'tables' object");
    std::map<std::string, TableInfo> tables;
    for (const auto& [name, t] : j.at("tables").items()) {
        TableInfo info;
        info.columns = t.value("columns", std::vector<std::string>{});
        info.description = t.value("description", std::string{});
        info.sample_rows = t.value("sample_rows", std::string{});
        tables.emplace(name, std::move(info));
    }
    return SchemaCatalog(std::move(tables));
}

SchemaCatalog SchemaCatalog::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open schema file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed schema file " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json SchemaCatalog::to_json() const {
    nlohmann::json tables = nlohmann::json::object();
    for (const auto& [name, info] : tables_) {
        tables[name] = {{"columns", info.columns}, {"description", info.description}, {"sample_rows", info.sample_rows}};
    }
    return {{"tables", tables}};
}

std::set<std::string> SchemaCatalog::table_names() const {
    std::set<std::string> out;
    for (const auto& [name, _] : tables_) out.insert(name);
    return out;
}

bool SchemaCatalog::contains(const std::string& table) const {
    return tables_.count(text::normalize_table(table)) > 0;
}

std::string SchemaCatalog::schema_hash() const {
    std::string canon;
    for (const auto& [name, info] : tables_) {
        auto cols = info.columns;
        std::sort(cols.begin(), cols.end());
        canon += name + ":" + text::join(cols, ",") + "\n";
    }
    return text::sha256_hex(canon);
}

}  // namespace semcache
