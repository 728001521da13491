#include <docroute/text.hpp>

#include <algorithm>

namespace docroute {

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    });
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (is_word_char(c)) {
            if (c >= 'A' && c <= 'Z')
                c = static_cast<char>(c - 'A' + 'a');
            current.push_back(c);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return tokens;
}

std::set<std::string> token_set(std::string_view text) {
    auto tokens = tokenize(text);
    return {tokens.begin(), tokens.end()};
}

double token_jaccard(std::string_view a, std::string_view b) {
    auto sa = token_set(a);
    auto sb = token_set(b);
    if (sa.empty() && sb.empty())
        return 0.0;
    std::size_t intersection = 0;
    for (const auto& t : sa)
        if (sb.count(t))
            ++intersection;
    std::size_t unions = sa.size() + sb.size() - intersection;
    return unions == 0 ? 0.0 : static_cast<double>(intersection) / static_cast<double>(unions);
}

std::size_t find_whole_word(std::string_view haystack_lower, std::string_view needle_lower) {
    if (needle_lower.empty())
        return std::string_view::npos;
    std::size_t pos = 0;
    while ((pos = haystack_lower.find(needle_lower, pos)) != std::string_view::npos) {
        bool left_ok = pos == 0 || !is_word_char(haystack_lower[pos - 1]);
        std::size_t end = pos + needle_lower.size();
        bool right_ok = end == haystack_lower.size() || !is_word_char(haystack_lower[end]);
        if (left_ok && right_ok)
            return pos;
        ++pos;
    }
    return std::string_view::npos;
}

} // namespace docroute
