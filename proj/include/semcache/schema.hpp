#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace semcache {

struct TableInfo {
    std::vector<std::string> columns;
    std::string description;
    std::string sample_rows;
};

/// Table catalog: column lists (which drive the schema hash) plus the
/// descriptions and sample rows appended to assembled prompts.
///
/// File layout: {"tables": {"NAME": {"columns": [...], "description": "...", "sample_rows": "..."}}}
class SchemaCatalog {
public:
    SchemaCatalog() = default;
    explicit SchemaCatalog(std::map<std::string, TableInfo> tables);

    static SchemaCatalog from_json(const nlohmann::json& j);
    static SchemaCatalog load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    const std::map<std::string, TableInfo>& tables() const noexcept { return tables_; }
    std::set<std::string> table_names() const;
    bool contains(const std::string& table) const;

    // SHA-256 over the sorted "TABLE:col,col" lines. Descriptions and samples do not participate.
    std::string schema_hash() const;

private:
    std::map<std::string, TableInfo> tables_;
};

}  // namespace semcache
