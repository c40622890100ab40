#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace cloaksim {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Named sub-stream of a root seed. The result depends only on
// (root, name, index), so streams can be created in any order.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view name, std::uint64_t index = 0) {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return splitmix64(splitmix64(root ^ h) + splitmix64(index + 0x632BE59BD9B4E019ull));
}

inline Rng make_rng(std::uint64_t root, std::string_view name, std::uint64_t index = 0) {
    return Rng(derive_seed(root, name, index));
}

// Shot-noise draw. Large means fall back to a rounded normal to keep the
// sampler cheap; the switch point is far into the regime where the two agree.
inline double draw_counts(Rng& rng, double mean) {
    if (!(mean > 0.0)) return 0.0;
    if (mean > 1e7) {
        std::normal_distribution<double> gauss(mean, std::sqrt(mean));
        double v = std::round(gauss(rng));
        return v < 0.0 ? 0.0 : v;
    }
    std::poisson_distribution<long long> poisson(mean);
    return static_cast<double>(poisson(rng));
}

}  // namespace cloaksim
