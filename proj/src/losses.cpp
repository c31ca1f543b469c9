#include "chronoqa/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chronoqa/errors.hpp"

namespace chronoqa {
namespace {

void same_dims(std::span<const double> a, std::span<const double> b, std::span<const double> c) {
    if (a.size() != b.size() || a.size() != c.size()) {
        throw ValidationError("triplet vectors differ in dimension (" + std::to_string(a.size()) + ", " +
                              std::to_string(b.size()) + ", " + std::to_string(c.size()) + ")");
    }
}

// d ||x - y||_p / dx
std::vector<double> lp_distance_gradient(std::span<const double> x, std::span<const double> y, double p) {
    std::vector<double> g(x.size(), 0.0);
    const double dist = lp_distance(x, y, p);
    if (dist == 0.0) return g;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = x[i] - y[i];
        if (u == 0.0) continue;
        const double sign = u > 0.0 ? 1.0 : -1.0;
        g[i] = p == 1.0 ? sign : sign * std::pow(std::abs(u) / dist, p - 1.0);
    }
    return g;
}

}  // namespace

void LossConfig::validate() const {
    if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
    if (!(beta >= 0.0) || !(gamma >= 0.0)) throw ValidationError("beta and gamma must be non-negative");
    if (!(margin >= 0.0)) throw ValidationError("margin must be non-negative");
    if (!(norm_p >= 1.0)) throw ValidationError("norm_p must be at least 1");
}

double lp_distance(std::span<const double> x, std::span<const double> y, double p) {
    double acc = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
        return std::sqrt(acc);
    }
    if (p == 1.0) {
        for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
        return acc;
    }
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i] - y[i]), p);
    return std::pow(acc, 1.0 / p);
}

double triplet_margin_loss(std::span<const double> s, std::span<const double> pos, std::span<const double> neg,
                           const LossConfig& cfg) {
    same_dims(s, pos, neg);
    return std::max(lp_distance(s, pos, cfg.norm_p) - lp_distance(s, neg, cfg.norm_p) + cfg.margin, 0.0);
}

TripletGradient triplet_margin_gradient(std::span<const double> s, std::span<const double> pos,
                                        std::span<const double> neg, const LossConfig& cfg) {
    same_dims(s, pos, neg);
    const std::size_t d = s.size();
    TripletGradient g{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    const double inner = lp_distance(s, pos, cfg.norm_p) - lp_distance(s, neg, cfg.norm_p) + cfg.margin;
    if (!(inner > 0.0)) return g;
    const auto gp = lp_distance_gradient(s, pos, cfg.norm_p);
    const auto gn = lp_distance_gradient(s, neg, cfg.norm_p);
    for (std::size_t i = 0; i < d; ++i) {
        g.anchor[i] = gp[i] - gn[i];
        g.positive[i] = -gp[i];
        g.negative[i] = gn[i];
    }
    return g;
}

double cross_entropy(std::span<const double> logits, std::size_t target) {
    if (target >= logits.size()) {
        throw ValidationError("target index " + std::to_string(target) + " out of range for " +
                              std::to_string(logits.size()) + " logits");
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - mx);
    return std::log(sum) - (logits[target] - mx);
}

std::vector<double> cross_entropy_gradient(std::span<const double> logits, std::size_t target) {
    if (target >= logits.size()) throw ValidationError("target index out of range");
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> g(logits.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        g[j] = std::exp(logits[j] - mx);
        sum += g[j];
    }
    for (double& v : g) v /= sum;
    g[target] -= 1.0;
    return g;
}

double combined_loss(double l_predict, double l_similar, double l_triple, const LossConfig& cfg) {
    return cfg.alpha * l_predict + cfg.beta * l_similar + cfg.gamma * l_triple;
}

LossBreakdown tcl_step_loss(const EncodedInput& original, const EncodedInput* similar,
                            const EncodedInput* contrastive, std::size_t gold, const ModelParams& params,
                            const LossConfig& cfg, ModelParams* grads) {
    LossBreakdown out;
    LossConfig eff = cfg;
    if (similar == nullptr || contrastive == nullptr) {
        out.transform_available = false;
        eff.beta = 0.0;
        eff.gamma = 0.0;
    }
    const bool use_similar = eff.beta > 0.0;
    const bool use_triple = eff.gamma > 0.0;

    const Representation rep_ori = encode(original, params);
    const CandidateScores scores_ori = score_candidates(rep_ori, original, params);
    out.l_predict = cross_entropy(scores_ori.logits, gold);

    Representation rep_sim;
    Representation rep_con;
    CandidateScores scores_sim;
    if (use_similar || use_triple) rep_sim = encode(*similar, params);
    if (use_similar) {
        scores_sim = score_candidates(rep_sim, *similar, params);
        out.l_similar = cross_entropy(scores_sim.logits, gold);
    }
    if (use_triple) {
        rep_con = encode(*contrastive, params);
        out.l_triple = triplet_margin_loss(rep_ori.values, rep_sim.values, rep_con.values, eff);
    }
    out.total = combined_loss(out.l_predict, out.l_similar, out.l_triple, eff);

    if (grads == nullptr) return out;

    auto g_logits = cross_entropy_gradient(scores_ori.logits, gold);
    for (double& g : g_logits) g *= eff.alpha;
    auto g_rep_ori = score_backward(rep_ori, original, params, g_logits, *grads);

    std::vector<double> g_rep_sim(params.dim(), 0.0);
    if (use_similar) {
        auto g_sim_logits = cross_entropy_gradient(scores_sim.logits, gold);
        for (double& g : g_sim_logits) g *= eff.beta;
        g_rep_sim = score_backward(rep_sim, *similar, params, g_sim_logits, *grads);
    }
    if (use_triple) {
        const auto tg = triplet_margin_gradient(rep_ori.values, rep_sim.values, rep_con.values, eff);
        std::vector<double> g_rep_con(params.dim());
        for (std::size_t i = 0; i < params.dim(); ++i) {
            g_rep_ori[i] += eff.gamma * tg.anchor[i];
            g_rep_sim[i] += eff.gamma * tg.positive[i];
            g_rep_con[i] = eff.gamma * tg.negative[i];
        }
        encode_backward(*contrastive, g_rep_con, *grads);
    }
    encode_backward(original, g_rep_ori, *grads);
    if (use_similar || use_triple) encode_backward(*similar, g_rep_sim, *grads);
    return out;
}

}  // namespace chronoqa
