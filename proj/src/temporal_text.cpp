#include "chronoqa/temporal_text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <regex>

namespace chronoqa {
namespace {

bool is_ascii_alnum(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && std::isalnum(u) != 0;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// The word immediately preceding byte offset `pos`, lowercased.
std::string previous_word(std::string_view text, std::size_t pos) {
    std::size_t end = pos;
    while (end > 0 && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    std::size_t begin = end;
    while (begin > 0 && is_ascii_alnum(text[begin - 1])) --begin;
    return lower(text.substr(begin, end - begin));
}

std::optional<int> parse_count(const std::string& word) {
    static constexpr std::array<const char*, 21> kWords = {
        "zero", "one", "two", "three", "four", "five", "six",
        "seven", "eight", "nine", "ten", "eleven", "twelve", "thirteen",
        "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};
    int n = 0;
    auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), n);
    if (ec == std::errc{} && ptr == word.data() + word.size()) return n;
    for (std::size_t i = 0; i < kWords.size(); ++i) {
        if (word == kWords[i]) return static_cast<int>(i);
    }
    return std::nullopt;
}

std::optional<TimeRange> make_closed(Year a, Year b) {
    if (a > b) return std::nullopt;
    return TimeRange::closed(a, b);
}

}  // namespace

std::string to_string(const TimeRange& r) {
    return std::to_string(r.start) + "-" + (r.end ? std::to_string(*r.end) : std::string("now"));
}

std::vector<YearMention> extract_years(std::string_view text) {
    std::vector<YearMention> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_digit(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_digit(text[j])) ++j;
        const std::size_t len = j - i;

        bool standalone = len >= 3 && len <= 4 && text[i] != '0';
        if (standalone && i > 0) {
            const char prev = text[i - 1];
            if (is_ascii_alnum(prev)) standalone = false;
            if ((prev == '.' || prev == ',') && i > 1 && is_digit(text[i - 2])) standalone = false;
        }
        if (standalone && j < text.size()) {
            const char next = text[j];
            if (is_ascii_alnum(next)) standalone = false;
            if ((next == '.' || next == ',') && j + 1 < text.size() && is_digit(text[j + 1])) {
                standalone = false;
            }
        }
        if (standalone) {
            int value = 0;
            std::from_chars(text.data() + i, text.data() + j, value);
            if (value >= kMinYear && value <= kMaxYear) out.push_back({value, i, j});
        }
        i = j;
    }
    return out;
}

std::optional<TimeRange> parse_range(std::string_view text) {
    const auto mentions = extract_years(text);

    // "from A to B"
    for (std::size_t k = 0; k + 1 < mentions.size(); ++k) {
        const auto& a = mentions[k];
        const auto& b = mentions[k + 1];
        const std::string between = lower(trim(text.substr(a.end, b.begin - a.end)));
        if ((between == "to" || between == "until") && previous_word(text, a.begin) == "from") {
            return make_closed(a.value, b.value);
        }
    }

    // "A-B", "A–B", "A—B"
    for (std::size_t k = 0; k + 1 < mentions.size(); ++k) {
        const auto& a = mentions[k];
        const auto& b = mentions[k + 1];
        const std::string_view between = trim(text.substr(a.end, b.begin - a.end));
        if (between == "-" || between == "–" || between == "—") {
            return make_closed(a.value, b.value);
        }
    }

    // "A ... for the next N years"
    static const std::regex kNextYears(R"(\bfor\s+the\s+next\s+([A-Za-z]+|\d+)\s+years?\b)",
                                       std::regex::icase);
    const std::string owned(text);
    for (auto it = std::sregex_iterator(owned.begin(), owned.end(), kNextYears);
         it != std::sregex_iterator(); ++it) {
        const auto phrase_pos = static_cast<std::size_t>(it->position(0));
        const auto count = parse_count(lower((*it)[1].str()));
        if (!count) continue;
        const YearMention* anchor = nullptr;
        for (const auto& m : mentions) {
            if (m.end <= phrase_pos) anchor = &m;
        }
        if (anchor != nullptr) return make_closed(anchor->value, anchor->value + *count);
    }

    // "since A"
    for (const auto& m : mentions) {
        if (previous_word(text, m.begin) == "since") return TimeRange::open_ended(m.value);
    }
    return std::nullopt;
}

bool year_in_range(Year y, const TimeRange& r) noexcept {
    return r.start <= y && (!r.end || y <= *r.end);
}

std::string replace_year(std::string_view text, const YearMention& mention, Year replacement) {
    std::string out;
    out.reserve(text.size() + 2);
    out.append(text.substr(0, mention.begin));
    out.append(std::to_string(replacement));
    out.append(text.substr(mention.end));
    return out;
}

}  // namespace chronoqa
