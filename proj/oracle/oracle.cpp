#include "oracle.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "chronoqa/losses.hpp"
#include "chronoqa/qa_model.hpp"

namespace chronoqa::oracle {

void OracleReport::check(std::string id, const std::string& expected, const std::string& actual) {
    ++checked;
    if (expected != actual) mismatches.push_back({std::move(id), expected, actual});
}

std::string oracle_answer(const Context& ctx, Relation relation, Year year, Year now_year) {
    std::vector<const TimelineFact*> covering;
    for (const auto& f : ctx.facts) {
        if (f.relation != relation) continue;
        const Year hi = f.valid.end ? *f.valid.end : now_year;
        if (f.valid.start <= year && year <= hi) covering.push_back(&f);
    }
    if (covering.size() > 1) {
        throw OracleError("context " + ctx.context_id + ": " + std::to_string(covering.size()) +
                          " facts cover year " + std::to_string(year));
    }
    return covering.empty() ? std::string() : covering.front()->value;
}

Relation oracle_relation(const Question& q, const Context& ctx) {
    std::set<Relation> all;
    for (const auto& f : ctx.facts) {
        all.insert(f.relation);
        if (!q.answer.empty() && f.value == q.answer) return f.relation;
    }
    if (all.size() == 1) return *all.begin();
    throw OracleError("cannot tell which relation question " + q.question_id + " asks about");
}

std::vector<Year> oracle_changing_years(const Context& ctx, Relation relation, const std::string& answer, Year earliest,
                                        Year now_year) {
    std::vector<Year> out;
    for (Year y = earliest; y <= now_year; ++y) {
        if (oracle_answer(ctx, relation, y, now_year) != answer) out.push_back(y);
    }
    return out;
}

std::string naive_normalize(const std::string& s) {
    std::string lowered;
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (u >= 0x80) {
            lowered.push_back(c);
        } else if (std::ispunct(u)) {
            continue;
        } else if (u >= 'A' && u <= 'Z') {
            lowered.push_back(static_cast<char>(u - 'A' + 'a'));
        } else {
            lowered.push_back(c);
        }
    }
    std::istringstream in(lowered);
    std::vector<std::string> kept;
    std::string w;
    while (in >> w) {
        if (w != "a" && w != "an" && w != "the") kept.push_back(w);
    }
    std::string out;
    for (std::size_t i = 0; i < kept.size(); ++i) out += (i ? " " : "") + kept[i];
    return out;
}

int naive_exact_match(const std::string& pred, const std::string& gold) {
    return naive_normalize(pred) == naive_normalize(gold) ? 1 : 0;
}

double naive_f1(const std::string& pred, const std::string& gold) {
    std::multiset<std::string> p;
    std::multiset<std::string> g;
    std::string w;
    std::istringstream ip(naive_normalize(pred));
    while (ip >> w) p.insert(w);
    std::istringstream ig(naive_normalize(gold));
    while (ig >> w) g.insert(w);
    if (p.empty() || g.empty()) return p.empty() && g.empty() ? 1.0 : 0.0;
    std::vector<std::string> common;
    std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(common));
    if (common.empty()) return 0.0;
    const double precision = static_cast<double>(common.size()) / static_cast<double>(p.size());
    const double recall = static_cast<double>(common.size()) / static_cast<double>(g.size());
    return 2.0 * precision * recall / (precision + recall);
}

std::vector<double> fd_gradient(const LossFn& loss, std::vector<double> params, double h) {
    if (!(h > 0.0)) throw OracleError("finite-difference step must be positive");
    std::vector<double> grad(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double up = loss(params);
        params[i] = saved - h;
        const double down = loss(params);
        params[i] = saved;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

double relative_error(double analytic, double numeric) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
    return std::abs(analytic - numeric) / scale;
}

namespace {

struct Instance {
    ModelParams params;
    EncodedInput original;
    EncodedInput similar;
    EncodedInput contrastive;
    bool with_triplet = true;
    std::size_t gold = 0;
    LossConfig cfg;
};

std::vector<TokenId> draw_tokens(std::mt19937_64& rng, std::size_t vocab, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(1, max_len);
    std::uniform_int_distribution<TokenId> id(1, static_cast<TokenId>(vocab - 1));
    std::vector<TokenId> out(len(rng));
    for (auto& t : out) t = id(rng);
    return out;
}

Instance draw_instance(std::mt19937_64& rng, const GradcheckOptions& opt) {
    std::uniform_int_distribution<std::size_t> vocab_d(2, 20);
    std::uniform_int_distribution<std::size_t> dim_d(1, 8);
    std::uniform_int_distribution<std::size_t> cand_d(1, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Instance in;
    const std::size_t vocab = vocab_d(rng);
    const std::size_t dim = opt.fixed_dim ? opt.fixed_dim : dim_d(rng);
    const std::size_t n_cand = opt.fixed_candidates ? opt.fixed_candidates : cand_d(rng);

    in.params = ModelParams(vocab, dim);
    std::uniform_real_distribution<double> w(-1.0, 1.0);
    for (double& v : in.params.values()) v = w(rng);

    EncodedInput base;
    base.context_tokens = draw_tokens(rng, vocab, 8);
    for (std::size_t j = 0; j + 1 < n_cand; ++j) {
        base.candidates.push_back("c" + std::to_string(j));
        base.candidate_tokens.push_back(draw_tokens(rng, vocab, 3));
        base.temporal_overlap.push_back(unit(rng) < 0.5 ? 1.0 : 0.0);
    }
    base.candidates.emplace_back();
    base.candidate_tokens.push_back({0});
    base.temporal_overlap.push_back(0.0);

    in.original = base;
    in.original.question_tokens = draw_tokens(rng, vocab, 5);
    in.similar = base;
    in.similar.question_tokens = draw_tokens(rng, vocab, 5);
    in.contrastive = base;
    in.contrastive.question_tokens = draw_tokens(rng, vocab, 5);
    in.with_triplet = unit(rng) >= 0.1;
    in.gold = std::uniform_int_distribution<std::size_t>(0, n_cand - 1)(rng);

    if (unit(rng) < 0.35) {
        in.cfg = LossConfig{1.0, 0.5, 0.5, 1.0, 2.0};
    } else {
        constexpr double kNorms[] = {1.0, 1.5, 2.0, 3.0};
        in.cfg.alpha = 0.1 + 1.9 * unit(rng);
        in.cfg.beta = unit(rng);
        in.cfg.gamma = unit(rng);
        in.cfg.margin = 2.0 * unit(rng);
        in.cfg.norm_p = kNorms[std::uniform_int_distribution<int>(0, 3)(rng)];
    }
    return in;
}

// Central differences are only meaningful away from the hinge and, for
// p < 2, away from zero coordinate differences.
bool smooth_enough(const Instance& in, double h) {
    if (!in.with_triplet || in.cfg.gamma == 0.0) return true;
    const auto a = encode(in.original, in.params).values;
    const auto s = encode(in.similar, in.params).values;
    const auto c = encode(in.contrastive, in.params).values;
    const double dp = lp_distance(a, s, in.cfg.norm_p);
    const double dn = lp_distance(a, c, in.cfg.norm_p);
    const double guard = 1e3 * h;
    if (std::abs(dp - dn + in.cfg.margin) < guard || dp < guard || dn < guard) return false;
    if (in.cfg.norm_p < 2.0) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (std::abs(a[i] - s[i]) < guard || std::abs(a[i] - c[i]) < guard) return false;
        }
    }
    return true;
}

}  // namespace

GradcheckResult run_gradcheck(const GradcheckOptions& options) {
    std::mt19937_64 rng(options.seed);
    GradcheckResult res;
    for (int k = 0; k < options.instances; ++k) {
        Instance in = draw_instance(rng, options);
        while (!smooth_enough(in, options.h)) {
            ++res.resampled;
            in = draw_instance(rng, options);
        }
        const EncodedInput* sim = in.with_triplet ? &in.similar : nullptr;
        const EncodedInput* con = in.with_triplet ? &in.contrastive : nullptr;

        ModelParams grads(in.params.vocab_size(), in.params.dim());
        tcl_step_loss(in.original, sim, con, in.gold, in.params, in.cfg, &grads);
        if (options.inject_sign_flip) {
            for (double& g : grads.projection()) g = -g;
        }

        ModelParams probe = in.params;
        const LossFn loss = [&](std::span<const double> values) {
            std::copy(values.begin(), values.end(), probe.values().begin());
            return tcl_step_loss(in.original, sim, con, in.gold, probe, in.cfg).total;
        };
        const std::vector<double> start(in.params.values().begin(), in.params.values().end());
        const auto numeric = fd_gradient(loss, start, options.h);
        const auto analytic = grads.values();
        for (std::size_t i = 0; i < numeric.size(); ++i) {
            const double e = relative_error(analytic[i], numeric[i]);
            if (e > res.max_relative_error) {
                res.max_relative_error = e;
                res.worst_instance = k;
            }
        }
        ++res.instances;
    }
    res.passed = res.max_relative_error < options.tolerance;
    return res;
}

}  // namespace chronoqa::oracle
