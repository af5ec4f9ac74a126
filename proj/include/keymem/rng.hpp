#pragma once

#include <cstdint>
#include <random>

namespace keymem {

// splitmix64; used both to expand seeds and to derive independent
// per-cell/per-realization streams from a master seed.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic seed for one (experiment, cell, realization) work item.
/// Independent of scheduling order by construction.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                                 std::uint64_t realization = 0) {
    std::uint64_t s = mix64(master);
    s = mix64(s ^ (0x632BE59BD9B4E019ULL + cell));
    s = mix64(s ^ (0x9E3779B97F4A7C15ULL + realization));
    return s;
}

/// Gaussian stream with a hand-rolled Box-Muller transform so that a given
/// seed reproduces bit-identical draws across standard library versions.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : eng_(mix64(seed)) {}

    double uniform01() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.28318530717958647692 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace keymem
