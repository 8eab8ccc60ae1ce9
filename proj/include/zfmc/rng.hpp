#ifndef ZFMC_RNG_HPP
#define ZFMC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace zfmc {

/**
 * Seeded generator wrapping std::mt19937_64. The uniform and normal draws
 * are hand-rolled from raw engine output so that identical seeds give
 * identical streams on every platform (standard-library distributions are
 * implementation-defined).
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Box-Muller; one fresh pair of uniforms per draw.
    double normal(double mean = 0.0, double sd = 1.0) {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 eng_;
};

// splitmix64-style mixing for deriving independent substream seeds.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace zfmc

#endif  // ZFMC_RNG_HPP
