#pragma once

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace semcache {

// Raw, unnormalized input for building a QuerySignature.
struct SignatureFields {
    std::string semantic_category;
    std::string query_type;
    std::string aggregation = "none";
    std::string primary_metric;
    std::string grouping = "none";
    std::vector<std::string> filter_types;
    std::string primary_table;
    std::vector<std::string> required_joins;
    std::vector<std::string> semantic_flags;
};

/// Five-level structural decomposition of an analytics question plus free-form
/// semantic flags. Immutable once built; the constructor normalizes every token
/// and throws std::invalid_argument when an invariant cannot hold.
///
/// Scalar tokens are lowercase with whitespace collapsed to '_'. Table
/// identifiers are uppercased so comparisons are case-insensitive.
class QuerySignature {
public:
    explicit QuerySignature(const SignatureFields& fields);

    const std::string& semantic_category() const noexcept { return category_; }
    const std::string& query_type() const noexcept { return query_type_; }
    const std::string& aggregation() const noexcept { return aggregation_; }
    const std::string& primary_metric() const noexcept { return metric_; }
    const std::string& grouping() const noexcept { return grouping_; }
    const std::set<std::string>& filter_types() const noexcept { return filters_; }
    const std::string& primary_table() const noexcept { return primary_table_; }
    const std::vector<std::string>& required_joins() const noexcept { return joins_; }
    const std::set<std::string>& semantic_flags() const noexcept { return flags_; }

    // query_type and aggregation form the "operation" unit.
    std::string operation() const { return query_type_ + "_" + aggregation_; }
    // {primary_table} ∪ required_joins
    std::set<std::string> tables() const;

    SignatureFields fields() const;

    friend bool operator==(const QuerySignature&, const QuerySignature&) = default;

private:
    std::string category_;
    std::string query_type_;
    std::string aggregation_;
    std::string metric_;
    std::string grouping_;
    std::set<std::string> filters_;
    std::string primary_table_;
    std::vector<std::string> joins_;
    std::set<std::string> flags_;
};

struct SimilarityWeights {
    double category = 0.25;
    double operation = 0.20;
    double metric = 0.15;
    double grouping = 0.15;
    double tables = 0.15;
    double flags = 0.10;

    double sum() const { return category + operation + metric + grouping + tables + flags; }
    // Throws std::invalid_argument on negative weights or a sum off 1.0 by more than 1e-9.
    void validate() const;
};

// "category|querytype_aggregation|metric_grouping|filter+filter|TABLE+JOIN"
std::string build_similarity_key(const QuerySignature& sig);

// Σ w_i · Match_i. Scalars match exactly (0/1); tables and flags use Jaccard,
// with Jaccard(∅, ∅) = 1.
double structural_similarity(const QuerySignature& a, const QuerySignature& b,
                             const SimilarityWeights& w = {});

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

void to_json(nlohmann::json& j, const QuerySignature& sig);
QuerySignature signature_from_json(const nlohmann::json& j);

}  // namespace semcache
