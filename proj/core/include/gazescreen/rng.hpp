#pragma once

#include <cstdint>
#include <vector>

namespace gazescreen {

/// PCG-RXS-M-XS 64/64: 64-bit LCG state with a 64-bit permuted output.
///
/// Every random decision in the project (simulation, fold shuffles, weight
/// init, batch order) draws from this generator so that results reproduce
/// across compilers and standard libraries. Distributions are implemented
/// here for the same reason; `std::*_distribution` output is
/// implementation-defined.
class Pcg64 {
public:
    static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
    static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

    explicit Pcg64(std::uint64_t seed) noexcept;

    std::uint64_t next() noexcept;

    /// Uniform integer in [0, bound), rejection-sampled (unbiased). bound > 0.
    std::uint64_t bounded(std::uint64_t bound) noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept;

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (cosine branch only; one draw per call pair).
    double normal() noexcept;

    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

    /// Index drawn proportionally to non-negative weights (sum > 0).
    std::size_t categorical(const std::vector<double>& weights) noexcept;

    template <typename T>
    void shuffle(std::vector<T>& items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(bounded(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    using result_type = std::uint64_t;

private:
    std::uint64_t state_;
};

/// SplitMix64 finalizer; derives independent child seeds from (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace gazescreen
