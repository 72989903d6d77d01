#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace bla {

/// Random engine used throughout the library.
using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/**
 * Derives an independent stream seed from a base seed plus a purpose label
 * and any number of integer indices (epoch, batch, datum, ...).
 *
 * Every random decision in a run is drawn from a stream derived this way,
 * so a (seed, purpose, indices) tuple identifies the same stream in any
 * process, regardless of evaluation order.
 */
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose,
                                 std::initializer_list<std::uint64_t> indices = {}) {
    std::uint64_t h = detail::splitmix64(base ^ detail::fnv1a(purpose));
    for (std::uint64_t idx : indices) {
        h = detail::splitmix64(h ^ idx);
    }
    return h;
}

inline Rng make_rng(std::uint64_t base, std::string_view purpose,
                    std::initializer_list<std::uint64_t> indices = {}) {
    return Rng(derive_seed(base, purpose, indices));
}

} // namespace bla
