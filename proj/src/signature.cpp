#include "semcache/signature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "semcache/text.hpp"

namespace semcache {

namespace {

std::string required_token(const std::string& raw, const char* name) {
    auto t = text::normalize_token(raw);
    if (t.empty()) throw std::invalid_argument(std::string("signature field '") + name + "' is empty");
    return t;
}

std::set<std::string> token_set(const std::vector<std::string>& raw, const char* name) {
    std::set<std::string> out;
    for (const auto& r : raw) out.insert(required_token(r, name));
    return out;
}

}  // namespace

QuerySignature::QuerySignature(const SignatureFields& f)
    : category_(required_token(f.semantic_category, "semantic_category")),
      query_type_(required_token(f.query_type, "query_type")),
      aggregation_(required_token(f.aggregation, "aggregation")),
      metric_(required_token(f.primary_metric, "primary_metric")),
      grouping_(required_token(f.grouping, "grouping")),
      filters_(token_set(f.filter_types, "filter_types")),
      primary_table_(text::normalize_table(f.primary_table)),
      flags_(token_set(f.semantic_flags, "semantic_flags")) {
    if (primary_table_.empty()) throw std::invalid_argument("signature field 'primary_table' is empty");
    for (const auto& raw : f.required_joins) {
        auto t = text::normalize_table(raw);
        if (t.empty()) throw std::invalid_argument("signature join table is empty");
        if (t == primary_table_)
            throw std::invalid_argument("primary table '" + t + "' listed in required_joins");
        if (std::find(joins_.begin(), joins_.end(), t) != joins_.end())
            throw std::invalid_argument("join table '" + t + "' listed twice");
        joins_.push_back(std::move(t));
    }
}

std::set<std::string> QuerySignature::tables() const {
    std::set<std::string> out(joins_.begin(), joins_.end());
    out.insert(primary_table_);
    return out;
}

SignatureFields QuerySignature::fields() const {
    return SignatureFields{category_,
                           query_type_,
                           aggregation_,
                           metric_,
                           grouping_,
                           {filters_.begin(), filters_.end()},
                           primary_table_,
                           joins_,
                           {flags_.begin(), flags_.end()}};
}

void SimilarityWeights::validate() const {
    for (double w : {category, operation, metric, grouping, tables, flags}) {
        if (!(w >= 0.0) || w > 1.0) throw std::invalid_argument("similarity weight outside [0,1]");
    }
    if (std::abs(sum() - 1.0) > 1e-9) throw std::invalid_argument("similarity weights must sum to 1");
}

std::string build_similarity_key(const QuerySignature& sig) {
    std::string key;
    key += sig.semantic_category();
    key += '|';
    key += sig.operation();
    key += '|';
    key += sig.primary_metric() + "_" + sig.grouping();
    key += '|';
    // std::set iteration is already lexicographic
    key += text::join({sig.filter_types().begin(), sig.filter_types().end()}, "+");
    key += '|';
    key += sig.primary_table();
    for (const auto& j : sig.required_joins()) key += "+" + j;
    return key;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double structural_similarity(const QuerySignature& a, const QuerySignature& b, const SimilarityWeights& w) {
    auto eq = [](const std::string& x, const std::string& y) { return x == y ? 1.0 : 0.0; };
    double s = w.category * eq(a.semantic_category(), b.semantic_category()) +
               w.operation * eq(a.operation(), b.operation()) +
               w.metric * eq(a.primary_metric(), b.primary_metric()) +
               w.grouping * eq(a.grouping(), b.grouping()) +
               w.tables * jaccard(a.tables(), b.tables()) +
               w.flags * jaccard(a.semantic_flags(), b.semantic_flags());
    return std::clamp(s, 0.0, 1.0);
}

void to_json(nlohmann::json& j, const QuerySignature& sig) {
    j = nlohmann::json{{"semantic_category", sig.semantic_category()},
                       {"query_type", sig.query_type()},
                       {"aggregation", sig.aggregation()},
                       {"primary_metric", sig.primary_metric()},
                       {"grouping", sig.grouping()},
                       {"filter_types", sig.filter_types()},
                       {"primary_table", sig.primary_table()},
                       {"required_joins", sig.required_joins()},
                       {"semantic_flags", sig.semantic_flags()}};
}

QuerySignature signature_from_json(const nlohmann::json& j) {
    SignatureFields f;
    f.semantic_category = j.at("semantic_category").get<std::string>();
    f.query_type = j.at("query_type").get<std::string>();
    f.aggregation = j.value("aggregation", std::string("none"));
    f.primary_metric = j.at("primary_metric").get<std::string>();
    f.grouping = j.value("grouping", std::string("none"));
    f.filter_types = j.value("filter_types", std::vector<std::string>{});
    f.primary_table = j.at("primary_table").get<std::string>();
    f.required_joins = j.value("required_joins", std::vector<std::string>{});
    f.semantic_flags = j.value("semantic_flags", std::vector<std::string>{});
    return QuerySignature(f);
}

}  // namespace semcache
