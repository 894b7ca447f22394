#include "semcache/prompt_assembly.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "semcache/text.hpp"

namespace semcache {

std::string to_string(Audience a) { return a == Audience::Planner ? "planner" : "codegen"; }

Audience audience_from_string(std::string_view s) {
    const auto t = text::normalize_token(s);
    if (t == "planner") return Audience::Planner;
    if (t == "codegen") return Audience::Codegen;
    throw std::invalid_argument("unknown audience '" + std::string(s) + "'");
}

ReductionReport ReductionReport::from_counts(std::size_t full, std::size_t filtered) {
    ReductionReport r{full, filtered, 0.0};
    if (full > 0) r.reduction_pct = 1.0 - static_cast<double>(filtered) / static_cast<double>(full);
    return r;
}

ReductionReport& ReductionReport::operator+=(const ReductionReport& other) {
    *this = from_counts(full_tokens + other.full_tokens, filtered_tokens + other.filtered_tokens);
    return *this;
}

std::size_t estimate_tokens(std::string_view s) { return (text::utf8_length(s) + 3) / 4; }

namespace {
bool fragment_order(const PromptFragment& a, const PromptFragment& b) {
    if (a.audience != b.audience) return a.audience < b.audience;
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.id < b.id;
}
}  // namespace

PromptRepository::PromptRepository(std::vector<PromptFragment> fragments, std::set<std::string> known_tables)
    : fragments_(std::move(fragments)) {
    std::set<std::string> ids;
    std::set<std::string> tagged;
    for (auto& f : fragments_) {
        if (f.id.empty()) throw InputError("prompt fragment with empty id");
        if (!ids.insert(f.id).second) throw InputError("duplicate prompt fragment id '" + f.id + "'");
        if (text::trim(f.text).empty()) throw InputError("prompt fragment '" + f.id + "' has empty text");
        if (f.global && !f.tables.empty()) throw InputError("global prompt fragment '" + f.id + "' lists tables");
        if (!f.global && f.tables.empty()) throw InputError("prompt fragment '" + f.id + "' has no tables and is not GLOBAL");
        std::set<std::string> norm;
        for (const auto& t : f.tables) norm.insert(text::normalize_table(t));
        f.tables = std::move(norm);
        tagged.insert(f.tables.begin(), f.tables.end());
    }
    for (const auto& t : known_tables) known_tables_.insert(text::normalize_table(t));
    if (known_tables_.empty()) {
        known_tables_ = std::move(tagged);
    } else {
        std::vector<std::string> unknown;
        std::set_difference(tagged.begin(), tagged.end(), known_tables_.begin(), known_tables_.end(),
                            std::back_inserter(unknown));
        if (!unknown.empty()) throw InputError("prompt fragments tag unknown tables: " + text::join(unknown, ", "));
    }
    std::sort(fragments_.begin(), fragments_.end(), fragment_order);
}

PromptRepository PromptRepository::read(std::istream& in, std::set<std::string> known_tables) {
    std::vector<PromptFragment> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        PromptFragment f;
        try {
            const auto j = nlohmann::json::parse(line);
            f.id = j.at("id").get<std::string>();
            f.audience = audience_from_string(j.at("audience").get<std::string>());
            f.priority = j.value("priority", 0);
            f.text = j.at("text").get<std::string>();
            const auto& tables = j.at("tables");
            if (tables.is_string()) {
                if (tables.get<std::string>() != "GLOBAL") throw InputError("tables must be a list or \"GLOBAL\"");
                f.global = true;
            } else {
                for (const auto& t : tables) f.tables.insert(t.get<std::string>());
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("malformed prompt record: ") + e.what(), line_no);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what(), line_no);
        }
        if (!ids.insert(f.id).second) throw InputError("duplicate prompt fragment id '" + f.id + "'", line_no);
        if (text::trim(f.text).empty()) throw InputError("prompt fragment '" + f.id + "' has empty text", line_no);
        out.push_back(std::move(f));
    }
    return PromptRepository(std::move(out), std::move(known_tables));
}

PromptRepository PromptRepository::load(const std::filesystem::path& path, std::set<std::string> known_tables) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open prompt repository " + path.string());
    return read(in, std::move(known_tables));
}

void PromptRepository::write(std::ostream& out) const {
    for (const auto& f : fragments_) {
        nlohmann::json j{{"id", f.id}, {"audience", to_string(f.audience)}, {"priority", f.priority}, {"text", f.text}};
        j["tables"] = f.global ? nlohmann::json("GLOBAL") : nlohmann::json(f.tables);
        out << j.dump() << '\n';
    }
}

std::size_t PromptRepository::count(Audience a) const {
    return static_cast<std::size_t>(
        std::count_if(fragments_.begin(), fragments_.end(), [a](const PromptFragment& f) { return f.audience == a; }));
}

std::vector<PromptFragment> PromptRepository::all(Audience a) const {
    std::vector<PromptFragment> out;
    for (const auto& f : fragments_) {
        if (f.audience == a) out.push_back(f);
    }
    return out;
}

std::vector<PromptFragment> PromptRepository::filter_by_tables(Audience a, const std::set<std::string>& tables) const {
    std::set<std::string> wanted;
    std::vector<std::string> unknown;
    for (const auto& t : tables) {
        auto n = text::normalize_table(t);
        if (!known_tables_.count(n)) unknown.push_back(n);
        wanted.insert(std::move(n));
    }
    if (!unknown.empty()) throw std::invalid_argument("unknown tables: " + text::join(unknown, ", "));

    std::vector<PromptFragment> out;
    for (const auto& f : fragments_) {
        if (f.audience != a) continue;
        const bool hit = f.global || std::any_of(f.tables.begin(), f.tables.end(),
                                                 [&](const std::string& t) { return wanted.count(t) > 0; });
        if (hit) out.push_back(f);
    }
    return out;
}

AssembledPrompt assemble(std::span<const PromptFragment> fragments,
                         const std::map<std::string, std::string>& table_descriptions,
                         const std::map<std::string, std::string>& sample_rows, const TokenEstimator& estimator) {
    AssembledPrompt out;
    std::vector<std::string> blocks;
    std::set<std::string> seen;
    for (const auto& f : fragments) {
        if (!seen.insert(f.id).second) continue;
        blocks.push_back(f.text);
        out.fragment_ids.push_back(f.id);
    }
    for (const auto& [table, desc] : table_descriptions) {
        out.tables.insert(table);
        blocks.push_back("### TABLE " + table + "\n" + desc);
    }
    for (const auto& [table, rows] : sample_rows) {
        out.tables.insert(table);
        blocks.push_back("### SAMPLE ROWS " + table + "\n" + rows);
    }
    out.text = text::join(blocks, "\n\n");
    out.token_count = estimator(out.text);
    return out;
}

namespace {
AssembledPrompt assemble_with_catalog(const std::vector<PromptFragment>& fragments,
                                      const std::set<std::string>& tables, const SchemaCatalog& catalog,
                                      const TokenEstimator& estimator) {
    std::map<std::string, std::string> descriptions;
    std::map<std::string, std::string> samples;
    for (const auto& raw : tables) {
        const auto t = text::normalize_table(raw);
        auto it = catalog.tables().find(t);
        if (it == catalog.tables().end()) continue;
        if (!it->second.description.empty()) descriptions[t] = it->second.description;
        if (!it->second.sample_rows.empty()) samples[t] = it->second.sample_rows;
    }
    return assemble(fragments, descriptions, samples, estimator);
}
}  // namespace

AssembledPrompt assemble_for_tables(const PromptRepository& repo, Audience audience,
                                    const std::set<std::string>& tables, const SchemaCatalog& catalog,
                                    const TokenEstimator& estimator) {
    return assemble_with_catalog(repo.filter_by_tables(audience, tables), tables, catalog, estimator);
}

AssembledPrompt assemble_full(const PromptRepository& repo, Audience audience, const SchemaCatalog& catalog,
                              const TokenEstimator& estimator) {
    return assemble_with_catalog(repo.all(audience), catalog.table_names(), catalog, estimator);
}

ReductionReport measure_reduction(const PromptRepository& repo, Audience audience,
                                  const std::set<std::string>& tables, const SchemaCatalog& catalog,
                                  const TokenEstimator& estimator) {
    const auto full = assemble_full(repo, audience, catalog, estimator);
    const auto filtered = assemble_for_tables(repo, audience, tables, catalog, estimator);
    return ReductionReport::from_counts(full.token_count, filtered.token_count);
}

}  // namespace semcache
