#include <doctest.h>

#include "chronoqa/metrics.hpp"

using namespace chronoqa;

TEST_CASE("normalize_answer") {
    CHECK(normalize_answer("  The Lord   Advocate! ") == "lord advocate");
    CHECK(normalize_answer("an apple, a pear") == "apple pear");
}

TEST_CASE("exact match") {
    CHECK(exact_match("lord advocate", "Lord Advocate") == 1);
    CHECK(exact_match("", "") == 1);
    CHECK(exact_match("Sydney United", "South Coast Wolves") == 0);
    CHECK(exact_match("", "South Coast Wolves") == 0);
}

TEST_CASE("token f1") {
    CHECK(token_f1("Royal Challengers Bangalore", "Royal Challengers Bangalore") == 1.0);
    CHECK(token_f1("University Hall", "St Andrews University") == 0.4);
    CHECK(token_f1("", "Royal Challengers Bangalore") == 0.0);
    CHECK(token_f1("", "") == 1.0);
    CHECK(token_f1("a a b", "a b b") == doctest::Approx(2.0 / 3.0));
}
