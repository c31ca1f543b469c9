#include "chronoqa/rng.hpp"

#include <vector>

namespace chronoqa {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) noexcept {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Rng::Rng(std::uint64_t root_seed, std::string_view stream,
         std::initializer_list<std::uint64_t> tags) {
    const std::uint64_t name_hash = fnv1a64(stream);
    std::vector<std::uint32_t> words = {
        static_cast<std::uint32_t>(root_seed),
        static_cast<std::uint32_t>(root_seed >> 32),
        static_cast<std::uint32_t>(name_hash),
        static_cast<std::uint32_t>(name_hash >> 32),
    };
    for (std::uint64_t t : tags) {
        words.push_back(static_cast<std::uint32_t>(t));
        words.push_back(static_cast<std::uint32_t>(t >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
}

std::size_t Rng::index(std::size_t n) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
}

long long Rng::between(long long lo, long long hi) {
    std::uniform_int_distribution<long long> dist(lo, hi);
    return dist(engine_);
}

double Rng::uniform(double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(engine_);
}

bool Rng::bernoulli(double p) {
    std::bernoulli_distribution dist(p);
    return dist(engine_);
}

}  // namespace chronoqa
