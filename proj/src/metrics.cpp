#include "chronoqa/metrics.hpp"

#include <cctype>
#include <unordered_map>

namespace chronoqa {
namespace {

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

bool is_article(std::string_view w) { return w == "a" || w == "an" || w == "the"; }

}  // namespace

std::string normalize_answer(std::string_view s) {
    std::string cleaned;
    cleaned.reserve(s.size());
    for (char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 0x80 && std::ispunct(c) != 0) continue;
        cleaned += c < 0x80 ? static_cast<char>(std::tolower(c)) : ch;
    }
    std::string out;
    for (const auto& w : split_ws(cleaned)) {
        if (is_article(w)) continue;
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

int exact_match(std::string_view prediction, std::string_view gold) {
    return normalize_answer(prediction) == normalize_answer(gold) ? 1 : 0;
}

double token_f1(std::string_view prediction, std::string_view gold) {
    const auto pred = split_ws(normalize_answer(prediction));
    const auto ref = split_ws(normalize_answer(gold));
    if (pred.empty() && ref.empty()) return 1.0;
    if (pred.empty() || ref.empty()) return 0.0;

    std::unordered_map<std::string, int> counts;
    for (const auto& t : ref) ++counts[t];
    int common = 0;
    for (const auto& t : pred) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return 0.0;
    // 2PR / (P + R) with P = c/|pred|, R = c/|gold| reduces to 2c / (|pred| + |gold|).
    return 2.0 * common / static_cast<double>(pred.size() + ref.size());
}

}  // namespace chronoqa
