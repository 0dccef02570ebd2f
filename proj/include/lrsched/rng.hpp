#pragma once

#include <cstdint>
#include <random>

namespace lrsched {

// Deterministic random source. Uniform and normal draws are generated with
// explicit algorithms (not std::*_distribution) so that streams are
// bit-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; pairs are cached.
    double normal();

    // Uniform integer in [0, n), Lemire multiply-shift.
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Derive an independent stream seed from (base, salt).
    static std::uint64_t mix(std::uint64_t base, std::uint64_t salt);

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace lrsched
