#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace chronoqa {

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;

/// Named random stream split off a single root seed.
///
/// Each component draws from its own stream ("corpus", "transform", "replay",
/// "init", "shuffle"), optionally refined by integer tags such as a stage or
/// epoch index, so changing how much one component consumes never perturbs
/// another.
class Rng {
public:
    Rng(std::uint64_t root_seed, std::string_view stream,
        std::initializer_list<std::uint64_t> tags = {});

    std::mt19937_64& engine() noexcept { return engine_; }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n);
    /// Uniform integer in [lo, hi].
    long long between(long long lo, long long hi);
    double uniform(double lo, double hi);
    bool bernoulli(double p);

private:
    std::mt19937_64 engine_;
};

}  // namespace chronoqa
