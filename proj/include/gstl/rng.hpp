#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

namespace gstl {

// Counter-based random streams. Every value is a pure function of
// (seed, counter), so sequences can be regenerated from any offset and
// materialized/streamed paths of the sensing ensembles produce identical
// values. The mixer is the splitmix64 finalizer.

inline std::uint64_t hash_u64(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t z = seed + (k + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Stable sub-seed derivation from a string tag (FNV-1a folded through the
// mixer), used to give each component of a generator its own stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char ch : tag) {
        h ^= ch;
        h *= 0x100000001B3ull;
    }
    return hash_u64(seed, h);
}

// Uniform in (0, 1]: never 0 so it is safe under log().
inline double u64_to_unit_pos(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

// Uniform in [0, 1).
inline double u64_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Stateless access to a seeded stream.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits_at(std::uint64_t k) const { return hash_u64(seed_, k); }
    double uniform_at(std::uint64_t k) const { return u64_to_unit(bits_at(k)); }

    // Standard normal via Box-Muller; entry k consumes counters 2k, 2k+1.
    double normal_at(std::uint64_t k) const {
        const double u1 = u64_to_unit_pos(bits_at(2 * k));
        const double u2 = u64_to_unit(bits_at(2 * k + 1));
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
};

// Sequential convenience wrapper over a stream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : stream_(seed) {}

    std::uint64_t next_u64() { return stream_.bits_at(counter_++); }
    double uniform() { return u64_to_unit(next_u64()); }
    double uniform_pos() { return u64_to_unit_pos(next_u64()); }

    double normal() {
        const double u1 = u64_to_unit_pos(next_u64());
        const double u2 = u64_to_unit(next_u64());
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform index in [0, n) by multiply-high; bias is ~n/2^64.
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

  private:
    RandomStream stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace gstl
