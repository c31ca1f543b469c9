#pragma once

// Brute-force reference implementations. Nothing here calls the production
// lookup or metric code; the gradient check drives the production loss and
// compares it against central differences.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chronoqa/corpus.hpp"

namespace chronoqa::oracle {

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Mismatch {
    std::string id;
    std::string expected;
    std::string actual;
};

struct OracleReport {
    std::size_t checked = 0;
    std::vector<Mismatch> mismatches;

    bool passed() const noexcept { return mismatches.empty(); }
    void check(std::string id, const std::string& expected, const std::string& actual);
};

/// Linear scan of every fact. Throws OracleError when two facts of the
/// relation both cover `year`.
std::string oracle_answer(const Context& ctx, Relation relation, Year year, Year now_year);

/// Relation of the fact whose value is the gold answer, else the context's
/// only relation. Throws OracleError when ambiguous.
Relation oracle_relation(const Question& q, const Context& ctx);

/// Every year in [earliest, now_year] at which the answer differs from `answer`.
std::vector<Year> oracle_changing_years(const Context& ctx, Relation relation, const std::string& answer, Year earliest,
                                        Year now_year);

std::string naive_normalize(const std::string& s);
int naive_exact_match(const std::string& pred, const std::string& gold);
double naive_f1(const std::string& pred, const std::string& gold);

using LossFn = std::function<double(std::span<const double>)>;

/// Central differences, one coordinate at a time.
std::vector<double> fd_gradient(const LossFn& loss, std::vector<double> params, double h);

/// |a - n| / max(|a|, |n|, 1e-4)
double relative_error(double analytic, double numeric);

struct GradcheckOptions {
    std::uint64_t seed = 1;
    int instances = 100;
    double h = 1e-5;
    double tolerance = 1e-4;
    /// Negate the analytic gradient of the projection block (mutation test).
    bool inject_sign_flip = false;
    /// 0 draws at random.
    std::size_t fixed_dim = 0;
    std::size_t fixed_candidates = 0;
};

struct GradcheckResult {
    int instances = 0;
    int resampled = 0;
    double max_relative_error = 0.0;
    int worst_instance = -1;
    bool passed = false;
};

/// Random tiny instances (V <= 20, d <= 8, <= 4 candidates, random loss
/// weights including 1 : 0.5 : 0.5). Instances sitting within reach of a
/// hinge or |x| kink are redrawn.
GradcheckResult run_gradcheck(const GradcheckOptions& options);

}  // namespace chronoqa::oracle
