#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace docroute {

inline bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::string to_lower_ascii(std::string_view s);

/// Tokenizer shared by the lexical index and the local providers:
/// lowercase, split on non-alphanumeric bytes, drop empty tokens.
/// No stemming, no stop-word removal.
std::vector<std::string> tokenize(std::string_view text);

std::set<std::string> token_set(std::string_view text);

/// Jaccard similarity between the token sets of two strings.
double token_jaccard(std::string_view a, std::string_view b);

/// Case-insensitive whole-word occurrence search. Word boundaries are
/// non-alphanumeric bytes (or string edges), so "brk.b" matches inside
/// "is brk.b up" but "apple" does not match inside "pineapple".
/// Returns the byte offset of the first occurrence, or npos.
std::size_t find_whole_word(std::string_view haystack_lower, std::string_view needle_lower);

} // namespace docroute
