#include <doctest.h>

#include <cmath>
#include <limits>

#include "chronoqa/errors.hpp"
#include "chronoqa/optimizer.hpp"

using namespace chronoqa;

TEST_CASE("zero gradient without decay is a fixed point") {
    std::vector<double> p{1.0, -2.0, 3.5};
    const std::vector<double> g(3, 0.0);
    AdamWState s;
    AdamWConfig cfg;
    cfg.weight_decay = 0.0;
    apply_update(p, g, s, cfg);
    CHECK(p == std::vector<double>{1.0, -2.0, 3.5});
}

TEST_CASE("one scalar step by hand") {
    std::vector<double> p{1.0};
    const std::vector<double> g{0.5};
    AdamWState s;
    AdamWConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.weight_decay = 0.01;
    apply_update(p, g, s, cfg);
    // m = 0.05, v = 0.00025; bias-corrected 0.5 and 0.25
    const double expected = 1.0 * (1.0 - 0.1 * 0.01) - 0.1 * 0.5 / (0.5 + 1e-8);
    CHECK(std::abs(p[0] - expected) < 1e-12);
    CHECK(s.step == 1);
    CHECK(std::abs(s.first_moment[0] - 0.05) < 1e-15);
    CHECK(std::abs(s.second_moment[0] - 0.00025) < 1e-15);
}

TEST_CASE("decoupled decay scales the parameter") {
    std::vector<double> p{2.0, -4.0};
    const std::vector<double> g(2, 0.0);
    AdamWState s;
    AdamWConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.weight_decay = 0.2;
    apply_update(p, g, s, cfg);
    CHECK(std::abs(p[0] - 2.0 * (1.0 - 0.01 * 0.2)) < 1e-15);
    CHECK(std::abs(p[1] + 4.0 * (1.0 - 0.01 * 0.2)) < 1e-15);
}

TEST_CASE("non-finite gradients leave everything untouched") {
    std::vector<double> p{1.0, 2.0};
    const std::vector<double> g{0.1, std::numeric_limits<double>::quiet_NaN()};
    AdamWState s;
    CHECK_THROWS_AS(apply_update(p, g, s, AdamWConfig{}), NumericalError);
    CHECK(p == std::vector<double>{1.0, 2.0});
    CHECK(s.step == 0);
    const std::vector<double> short_g{0.1};
    CHECK_THROWS_AS(apply_update(p, short_g, s, AdamWConfig{}), ValidationError);
}
