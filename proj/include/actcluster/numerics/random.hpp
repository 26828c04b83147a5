#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <utility>

namespace actc {

/// splitmix64 finalizer; bijective mixing of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based seed derivation: one master seed fans out to independent
/// streams (data order, init, UMAP, clustering) addressed by (stream, counter).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t counter = 0)
{
    return mix64(mix64(master ^ mix64(stream)) + counter);
}

namespace seed_stream {
inline constexpr std::uint64_t encoder_init = 1;
inline constexpr std::uint64_t head_init = 2;
inline constexpr std::uint64_t shuffle = 3;
inline constexpr std::uint64_t umap = 4;
inline constexpr std::uint64_t clustering = 5;
inline constexpr std::uint64_t subject = 6;
inline constexpr std::uint64_t synthetic = 7;
}  // namespace seed_stream

using Rng = std::mt19937_64;

/// Uniform double in [0,1) from the top 53 bits; stable across standard libraries.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

/// Standard normal via Box-Muller; avoids implementation-defined std::normal_distribution.
inline double standard_normal(Rng& rng)
{
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Uniform integer in [0, n), unbiased (Lemire's multiply-and-reject).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n)
{
    unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(rng()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

template <typename It>
void shuffle(It first, It last, Rng& rng)
{
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        const auto j = uniform_index(rng, i);
        std::swap(first[i - 1], first[j]);
    }
}

}  // namespace actc
