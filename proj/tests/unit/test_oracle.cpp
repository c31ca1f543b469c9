#include <doctest.h>

#include <cmath>

#include "oracle.hpp"

using namespace chronoqa;
using namespace chronoqa::oracle;

namespace {
Context obama() {
    Context c;
    c.context_id = "c1";
    c.entity = "Barack Hussein Obama";
    c.facts = {
        {Relation::position, "Illinois State Senator", TimeRange::closed(1997, 2004), 0, SurfaceForm::explicit_year},
        {Relation::position, "Federal Senator", TimeRange::closed(2005, 2008), 0, SurfaceForm::explicit_year},
        {Relation::position, "President", TimeRange::open_ended(2009), 0, SurfaceForm::explicit_year}};
    return c;
}
}  // namespace

TEST_CASE("oracle_answer") {
    const auto c = obama();
    CHECK(oracle_answer(c, Relation::position, 2006, 2023) == "Federal Senator");
    CHECK(oracle_answer(c, Relation::position, 1950, 2023).empty());
    CHECK(oracle_answer(c, Relation::position, 2005, 2023) == "Federal Senator");
    CHECK(oracle_answer(c, Relation::position, 2023, 2023) == "President");
    auto overlap = c;
    overlap.facts[1].valid = TimeRange::closed(2004, 2008);
    CHECK_THROWS_AS(oracle_answer(overlap, Relation::position, 2004, 2023), OracleError);
}

TEST_CASE("fd_gradient") {
    const LossFn quad = [](std::span<const double> x) { return 3.0 * x[0] * x[0] + x[0] * x[1]; };
    const auto g = fd_gradient(quad, {1.0, 2.0}, 1e-5);
    CHECK(std::abs(g[0] - 8.0) < 1e-8);
    CHECK(std::abs(g[1] - 1.0) < 1e-8);
    const LossFn flat = [](std::span<const double>) { return 4.0; };
    CHECK(fd_gradient(flat, {1.0, 2.0, 3.0}, 1e-5) == std::vector<double>(3, 0.0));
}

TEST_CASE("gradcheck") {
    GradcheckOptions o;
    o.instances = 30;
    CHECK(run_gradcheck(o).passed);
    o.inject_sign_flip = true;
    CHECK_FALSE(run_gradcheck(o).passed);
    GradcheckOptions tiny;
    tiny.instances = 10;
    tiny.fixed_dim = 1;
    tiny.fixed_candidates = 1;
    CHECK(run_gradcheck(tiny).passed);
}

TEST_CASE("naive metrics") {
    CHECK(naive_f1("University Hall", "St Andrews University") == doctest::Approx(0.4));
    CHECK(naive_exact_match("The Lord Advocate", "lord advocate") == 1);
}
