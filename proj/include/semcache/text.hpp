#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace semcache {

// Raised for malformed external input (files, records, CLI arguments).
// Line numbers are 1-based; 0 means "not line-addressable".
class InputError : public std::runtime_error {
public:
    InputError(const std::string& what, std::size_t line = 0);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace text {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string trim(std::string_view s);

// Lowercase, trim, and collapse internal whitespace runs to a single '_'.
std::string normalize_token(std::string_view s);

// Same as normalize_token but uppercased; table identifiers are case-insensitive.
std::string normalize_table(std::string_view s);

// Lowercase, trim, collapse whitespace runs to one space. Used for question dedup.
std::string normalize_question(std::string_view s);

// Lowercased word tokens; '-' and '_' stay inside words so item codes survive intact.
std::vector<std::string> words(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool contains_ci(std::string_view haystack, std::string_view needle);
void replace_all(std::string& s, std::string_view from, std::string_view to);

// Number of UTF-8 code points.
std::size_t utf8_length(std::string_view s);

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);
std::string sha256_hex(std::string_view data);

}  // namespace text
}  // namespace semcache
