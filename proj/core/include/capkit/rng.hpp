#pragma once
// Deterministic random sampling on top of std::mt19937_64. The standard
// distributions (uniform_int_distribution etc.) are implementation-defined,
// so every bounded draw here is hand-rolled: identical seeds give identical
// streams on every platform, which the artifact's determinism contract needs.

#include <cstdint>
#include <random>
#include <vector>

namespace capkit {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    // Uniform double in [0, 1) with 53 bits of precision.
    double uniform();

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    // True with probability p.
    bool bernoulli(double p) { return uniform() < p; }

    // k distinct indices drawn uniformly from [0, n), in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Derives an independent stream seed from a base seed and a stream index
// (splitmix64 finalizer). Used to give each sentence / epoch its own stream
// so results do not depend on processing order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace capkit
