#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace chronoqa {

/// Adam with decoupled weight decay.
struct AdamWConfig {
    double learning_rate = 5e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.01;
};

struct AdamWState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step = 0;

    friend bool operator==(const AdamWState&, const AdamWState&) = default;
};

/// One update in place:
///   p <- p * (1 - lr * wd)
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
///   p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
/// Moments are sized lazily on the first step. Throws NumericalError, leaving
/// everything untouched, if any gradient is non-finite; ValidationError on a
/// shape mismatch.
void apply_update(std::span<double> params, std::span<const double> grads, AdamWState& state,
                  const AdamWConfig& config);

}  // namespace chronoqa
