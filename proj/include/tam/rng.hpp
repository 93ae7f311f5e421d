#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tam {

using Rng = std::mt19937_64;

// Finalizer from splitmix64; full-period bijective mix.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed, a purpose tag and up
// to three indices. Every random decision in the library flows through this so
// that paired runs (same master seed, different variant) share exactly the
// streams they are supposed to share.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose,
                                 std::uint64_t a = 0, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : purpose) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    h = mix64(h ^ master);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

inline Rng make_rng(std::uint64_t master, std::string_view purpose,
                    std::uint64_t a = 0, std::uint64_t b = 0,
                    std::uint64_t c = 0) {
    return Rng(derive_seed(master, purpose, a, b, c));
}

}  // namespace tam
