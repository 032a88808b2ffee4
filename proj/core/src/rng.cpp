#include "gazescreen/rng.hpp"

#include <cmath>
#include <numbers>

namespace gazescreen {

Pcg64::Pcg64(std::uint64_t seed) noexcept : state_(0) {
    next();
    state_ += seed;
    next();
}

std::uint64_t Pcg64::next() noexcept {
    const std::uint64_t old = state_;
    state_ = old * kMultiplier + kIncrement;
    std::uint64_t word = ((old >> ((old >> 59U) + 5U)) ^ old) * 12605985483714917081ULL;
    return (word >> 43U) ^ word;
}

std::uint64_t Pcg64::bounded(std::uint64_t bound) noexcept {
    // Reject the low (2^64 mod bound) values so every residue is equally likely.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t r = next();
        if (r >= threshold) return r % bound;
    }
}

double Pcg64::uniform() noexcept {
    return static_cast<double>(next() >> 11U) * 0x1.0p-53;
}

double Pcg64::normal() noexcept {
    double u1 = uniform();
    double u2 = uniform();
    // u1 in (0, 1] keeps log finite.
    u1 = 1.0 - u1;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Pcg64::categorical(const std::vector<double>& weights) noexcept {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last_positive = i;
        acc += weights[i];
        if (u < acc) return i;
    }
    return last_positive;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
}

}  // namespace gazescreen
