#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace semcache {

// Fixed operation vocabulary, in canonical order.
inline constexpr std::string_view kPatternOps[] = {"load_data", "join_tables", "filter", "aggregate", "visualize"};

struct ReferencePattern {
    std::vector<std::string> operations;     // first-occurrence order in the code
    std::vector<std::string> join_keys;
    std::vector<std::string> table_pattern;  // primary table, then joins in load order

    bool empty() const noexcept { return operations.empty(); }
    // Compact text form handed to the planner instead of the full script.
    std::string render() const;
};

/// Lexical scan of pandas-style code. Comments and docstrings are ignored.
/// Unrecognized code yields an empty pattern.
ReferencePattern extract_reference_pattern(std::string_view code);

}  // namespace semcache
