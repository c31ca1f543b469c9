#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chronoqa/qa_model.hpp"

namespace chronoqa {

struct LossConfig {
    double alpha = 1.0;
    double beta = 0.5;
    double gamma = 0.5;
    double margin = 1.0;
    double norm_p = 2.0;

    /// alpha > 0; beta, gamma, margin >= 0; norm_p >= 1.
    void validate() const;
};

struct LossBreakdown {
    double l_predict = 0.0;
    double l_similar = 0.0;
    double l_triple = 0.0;
    double total = 0.0;
    /// False when the sample had no triplet and trained prediction-only.
    bool transform_available = true;
};

/// ||x - y||_p
double lp_distance(std::span<const double> x, std::span<const double> y, double p);

/// max(d(s, pos) - d(s, neg) + margin, 0). Throws ValidationError on a
/// dimension mismatch.
double triplet_margin_loss(std::span<const double> s, std::span<const double> pos, std::span<const double> neg,
                           const LossConfig& cfg);

struct TripletGradient {
    std::vector<double> anchor, positive, negative;
};

/// Gradient of triplet_margin_loss (zero when the hinge is inactive; a zero
/// distance contributes a zero subgradient).
TripletGradient triplet_margin_gradient(std::span<const double> s, std::span<const double> pos,
                                        std::span<const double> neg, const LossConfig& cfg);

/// -log softmax(logits)[target], max-subtracted. Throws ValidationError when
/// target is out of range.
double cross_entropy(std::span<const double> logits, std::size_t target);

/// softmax(logits) - onehot(target)
std::vector<double> cross_entropy_gradient(std::span<const double> logits, std::size_t target);

double combined_loss(double l_predict, double l_similar, double l_triple, const LossConfig& cfg);

/// Full temporal contrastive objective on one sample. `similar` and
/// `contrastive` may be null, in which case beta = gamma = 0 for this step and
/// the breakdown is flagged. Components whose weight is zero are not
/// evaluated and reported as 0. When `grads` is non-null the gradient of
/// `total` is accumulated into it.
LossBreakdown tcl_step_loss(const EncodedInput& original, const EncodedInput* similar,
                            const EncodedInput* contrastive, std::size_t gold, const ModelParams& params,
                            const LossConfig& cfg, ModelParams* grads = nullptr);

}  // namespace chronoqa
