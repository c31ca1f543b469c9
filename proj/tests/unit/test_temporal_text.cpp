#include <doctest.h>

#include "chronoqa/temporal_text.hpp"

using namespace chronoqa;

namespace {
std::vector<Year> years(std::string_view text) {
    std::vector<Year> out;
    for (const auto& m : extract_years(text)) out.push_back(m.value);
    return out;
}
}  // namespace

TEST_CASE("extract_years") {
    CHECK(years("What position did Barack Hussein Obama hold in 2010?") == std::vector<Year>{2010});
    CHECK(years("").empty());
    CHECK(years("Professor of Ancient History at the University of St Andrews from 1998 to 2014") ==
          std::vector<Year>{1998, 2014});
    CHECK(years("born 190 BC and 1,999 people in 19.75 or abc2001").size() == 1);
    CHECK(years("1961-2017") == std::vector<Year>{1961, 2017});
}

TEST_CASE("extract_years offsets") {
    const auto m = extract_years("in 2010?");
    REQUIRE(m.size() == 1);
    CHECK(m[0].begin == 3);
    CHECK(m[0].end == 7);
}

TEST_CASE("parse_range patterns") {
    CHECK(parse_range("purchased by the team at the 2011 IPL auctions for the next 3 years") ==
          TimeRange::closed(2011, 2014));
    CHECK(parse_range("1961–2017") == TimeRange::closed(1961, 2017));
    CHECK(parse_range("1961-2017") == TimeRange::closed(1961, 2017));
    CHECK(parse_range("from 1998 to 2014") == TimeRange::closed(1998, 2014));
    CHECK(parse_range("since 2009") == TimeRange::open_ended(2009));
    CHECK_FALSE(parse_range("no dates here"));
    CHECK_FALSE(parse_range("from 2014 to 1998"));
}

TEST_CASE("year_in_range") {
    CHECK(year_in_range(2010, TimeRange::closed(2008, 2017)));
    CHECK(year_in_range(2008, TimeRange::closed(2008, 2017)));
    CHECK(year_in_range(2017, TimeRange::closed(2008, 2017)));
    CHECK_FALSE(year_in_range(2018, TimeRange::closed(2008, 2017)));
    int covered = 0;
    for (Year y = 2000; y <= 2020; ++y) covered += year_in_range(y, TimeRange::closed(2011, 2014)) ? 1 : 0;
    CHECK(covered == 4);
    CHECK(year_in_range(2012, TimeRange::closed(2011, 2014)));
    CHECK(year_in_range(3000, TimeRange::open_ended(2009)));
}

TEST_CASE("replace_year keeps punctuation") {
    const std::string q = "What position did Barack Hussein Obama hold in 2010?";
    const auto m = extract_years(q);
    CHECK(replace_year(q, m.front(), 1995) == "What position did Barack Hussein Obama hold in 1995?");
}
