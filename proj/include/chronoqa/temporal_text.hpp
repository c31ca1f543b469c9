#pragma once

// Year-granularity temporal expressions: extraction of standalone year
// tokens and recognition of the handful of range phrasings the corpus uses.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chronoqa {

using Year = int;

inline constexpr Year kMinYear = 100;
inline constexpr Year kMaxYear = 2100;

struct YearMention {
    Year value = 0;
    std::size_t begin = 0;  ///< byte offset, inclusive
    std::size_t end = 0;    ///< byte offset, exclusive

    friend bool operator==(const YearMention&, const YearMention&) = default;
};

/// Closed year interval. An empty `end` is OPEN ("now", unbounded above).
struct TimeRange {
    Year start = 0;
    std::optional<Year> end;

    static TimeRange closed(Year s, Year e) { return TimeRange{s, e}; }
    static TimeRange open_ended(Year s) { return TimeRange{s, std::nullopt}; }

    bool is_open() const noexcept { return !end.has_value(); }
    /// Upper bound with OPEN resolved to `now_year`.
    Year resolved_end(Year now_year) const noexcept { return end.value_or(now_year); }

    friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

std::string to_string(const TimeRange& r);

/// All 3-4 digit standalone year tokens in [kMinYear, kMaxYear], left to right.
/// A token is standalone when it is not glued to ASCII letters or digits and is
/// not part of a decimal or thousands-separated number.
std::vector<YearMention> extract_years(std::string_view text);

/// Recognizes, in priority order, "from A to B", "A-B" (hyphen, en or em
/// dash), "A ... for the next N years" and "since A". Returns nullopt when no
/// pattern matches or the matched bounds are reversed.
std::optional<TimeRange> parse_range(std::string_view text);

bool year_in_range(Year y, const TimeRange& r) noexcept;

/// Replace the year at `mention` with `replacement` (4-digit years only ever
/// substitute whole tokens, so surrounding punctuation is preserved).
std::string replace_year(std::string_view text, const YearMention& mention, Year replacement);

}  // namespace chronoqa
