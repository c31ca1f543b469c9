#include "chronoqa/optimizer.hpp"

#include <cmath>
#include <string>

#include "chronoqa/errors.hpp"

namespace chronoqa {
namespace {

// Moments of parameters that stop receiving gradient decay geometrically into
// the subnormal range, where arithmetic is an order of magnitude slower. Below
// this floor a moment moves a parameter by less than lr * 1e-190.
constexpr double kMomentFloor = 1e-200;

}  // namespace

void apply_update(std::span<double> params, std::span<const double> grads, AdamWState& state,
                  const AdamWConfig& config) {
    const std::size_t n = params.size();
    if (grads.size() != n) {
        throw ValidationError("gradient has " + std::to_string(grads.size()) + " entries for " + std::to_string(n) +
                              " parameters");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(grads[i])) {
            throw NumericalError("non-finite gradient at parameter " + std::to_string(i));
        }
    }
    if (state.first_moment.empty() && state.second_moment.empty()) {
        state.first_moment.assign(n, 0.0);
        state.second_moment.assign(n, 0.0);
    }
    if (state.first_moment.size() != n || state.second_moment.size() != n) {
        throw ValidationError("optimizer state does not match the parameter count");
    }

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double lr = config.learning_rate;
    const double decay = 1.0 - lr * config.weight_decay;
    const double b1 = config.beta1;
    const double b2 = config.beta2;
    const double bias1 = 1.0 - std::pow(b1, t);
    const double bias2 = 1.0 - std::pow(b2, t);
    const double step_size = lr / bias1;
    const double inv_sqrt_bias2 = 1.0 / std::sqrt(bias2);

    double* p = params.data();
    double* m = state.first_moment.data();
    double* v = state.second_moment.data();
    const double* g = grads.data();
    for (std::size_t i = 0; i < n; ++i) {
        p[i] *= decay;
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        if (std::abs(m[i]) < kMomentFloor) m[i] = 0.0;
        if (v[i] < kMomentFloor) v[i] = 0.0;
        p[i] -= step_size * m[i] / (std::sqrt(v[i]) * inv_sqrt_bias2 + config.epsilon);
    }
}

}  // namespace chronoqa
