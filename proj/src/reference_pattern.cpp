#include "semcache/reference_pattern.hpp"

#include <algorithm>
#include <limits>
#include <regex>

#include "semcache/text.hpp"

namespace semcache {

std::string ReferencePattern::render() const {
    std::string out = "operations: " + text::join(operations, " -> ");
    if (!join_keys.empty()) out += "\njoin_keys: " + text::join(join_keys, ", ");
    if (!table_pattern.empty()) out += "\ntables: " + text::join(table_pattern, " + ");
    return out;
}

namespace {

// Drops '#' comments and triple-quoted blocks; string literals are kept intact.
std::string strip_comments(std::string_view code) {
    std::string out;
    out.reserve(code.size());
    char quote = 0;
    bool triple = false;
    for (std::size_t i = 0; i < code.size(); ++i) {
        const char c = code[i];
        if (quote) {
            if (!triple) out.push_back(c);
            if (c == '\\' && i + 1 < code.size()) {
                if (!triple) out.push_back(code[i + 1]);
                ++i;
                continue;
            }
            if (triple && code.substr(i, 3) == std::string(3, quote)) {
                quote = 0;
                triple = false;
                i += 2;
            } else if (!triple && (c == quote || c == '\n')) {
                quote = 0;
            }
            continue;
        }
        if (c == '#') {
            while (i < code.size() && code[i] != '\n') ++i;
            if (i < code.size()) out.push_back('\n');
            continue;
        }
        if (c == '"' || c == '\'') {
            quote = c;
            triple = code.substr(i, 3) == std::string(3, c);
            if (triple) {
                i += 2;
            } else {
                out.push_back(c);
            }
            continue;
        }
        out.push_back(c);
    }
    return out;
}

// Text between the '(' at `open` and its matching ')'.
std::string call_args(const std::string& s, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')' && --depth == 0) return s.substr(open + 1, i - open - 1);
    }
    return s.substr(std::min(open + 1, s.size()));
}

std::string table_from_source(const std::string& src) {
    static const std::regex from_re(R"(\bfrom\s+([A-Za-z_][\w.]*))", std::regex::icase);
    std::smatch m;
    if (std::regex_search(src, m, from_re)) return text::normalize_table(m[1].str());
    auto name = src;
    if (auto slash = name.find_last_of("/\\"); slash != std::string::npos) name = name.substr(slash + 1);
    if (auto dot = name.find('.'); dot != std::string::npos) name = name.substr(0, dot);
    return text::normalize_table(name);
}

void push_unique(std::vector<std::string>& v, std::string s) {
    if (!s.empty() && std::find(v.begin(), v.end(), s) == v.end()) v.push_back(std::move(s));
}

}  // namespace

ReferencePattern extract_reference_pattern(std::string_view code) {
    static const std::regex load_re(
        R"(\b(?:pd\.read_(?:csv|sql|sql_query|sql_table|parquet|excel|json)|load_table|read_table)\s*\()");
    static const std::regex first_string_re(R"(^\s*[rfb]?["']([^"']+)["'])");
    static const std::regex join_re(R"((?:\bpd\.merge|\.merge|\.join)\s*\()");
    static const std::regex key_arg_re(R"(\b(?:on|left_on|right_on)\s*=\s*(\[[^\]]*\]|["'][^"']+["']))");
    static const std::regex quoted_re(R"(["']([^"']+)["'])");
    static const std::regex filter_re(
        R"(\w+\s*\[\s*\(?\s*~?\s*\w+\s*(?:\[|\.\w+\s*(?:[=!<>]=?|\.isin))|\.query\s*\(|\.loc\s*\[[^\n]*?(?:==|!=|>=|<=|<|>|\.isin))");
    static const std::regex aggregate_re(
        R"(\.(?:groupby|sum|mean|count|agg|aggregate|size|median|nunique|pivot_table)\s*\()");
    static const std::regex visualize_re(R"(\b(?:plt|sns|px)\.\w+\s*\(|\.plot(?:\.\w+)?\s*\()");

    const std::string s = strip_comments(code);
    ReferencePattern out;

    constexpr auto kNever = std::numeric_limits<std::size_t>::max();
    auto first = [&](const std::regex& re) -> std::size_t {
        std::smatch m;
        return std::regex_search(s, m, re) ? static_cast<std::size_t>(m.position(0)) : kNever;
    };

    std::vector<std::pair<std::size_t, std::string>> found;
    std::size_t load_pos = kNever;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), load_re); it != std::sregex_iterator(); ++it) {
        const auto pos = static_cast<std::size_t>(it->position(0));
        load_pos = std::min(load_pos, pos);
        const auto args = call_args(s, pos + static_cast<std::size_t>(it->length(0)) - 1);
        std::smatch m;
        if (std::regex_search(args, m, first_string_re)) push_unique(out.table_pattern, table_from_source(m[1].str()));
    }
    found.emplace_back(load_pos, "load_data");

    std::size_t join_pos = kNever;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), join_re); it != std::sregex_iterator(); ++it) {
        const auto pos = static_cast<std::size_t>(it->position(0));
        const auto args = call_args(s, pos + static_cast<std::size_t>(it->length(0)) - 1);
        // str.join(...) and os.path.join(...) are not table joins
        const bool keyed = std::regex_search(args, key_arg_re);
        const bool frame_merge = s.compare(pos, 6, ".merge") == 0 || s.compare(pos, 8, "pd.merge") == 0;
        if (!keyed && !frame_merge) continue;
        join_pos = std::min(join_pos, pos);
        for (auto kt = std::sregex_iterator(args.begin(), args.end(), key_arg_re); kt != std::sregex_iterator(); ++kt) {
            const std::string val = (*kt)[1].str();
            for (auto qt = std::sregex_iterator(val.begin(), val.end(), quoted_re); qt != std::sregex_iterator(); ++qt)
                push_unique(out.join_keys, (*qt)[1].str());
        }
    }
    found.emplace_back(join_pos, "join_tables");
    found.emplace_back(first(filter_re), "filter");
    found.emplace_back(first(aggregate_re), "aggregate");
    found.emplace_back(first(visualize_re), "visualize");

    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [pos, op] : found) {
        if (pos != kNever) out.operations.push_back(op);
    }
    return out;
}

}  // namespace semcache
