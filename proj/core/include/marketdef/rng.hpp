#pragma once
// Counter-based pseudo-random generator.
//
// Draw i of stream (seed, stream) is mix64(key + i * GAMMA), so a stream is a
// pure function of (seed, stream, i). Derived sub-streams (RngSeed::child) let
// restarts and Monte-Carlo replicates consume independent streams in any
// execution order and still reproduce bit-identically.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "marketdef/errors.hpp"

namespace marketdef {

namespace detail {
// Stafford mix 13 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}
inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
} // namespace detail

struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    // Sub-stream `index` hanging off this one; collision-free for practical
    // purposes by 64-bit avalanche.
    RngSeed child(std::uint64_t index) const {
        return RngSeed{seed, detail::mix64(stream ^ detail::kGamma * (index + 1))};
    }
};

class Rng {
public:
    explicit Rng(RngSeed s)
        : key_(detail::mix64(detail::mix64(s.seed) ^ (s.stream * detail::kGamma + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t next_u64() { return detail::mix64(key_ + detail::kGamma * ++counter_); }

    // Uniform on [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [0, n) without modulo bias (Lemire rejection).
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw DomainError("rng: next_below(0)");
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform integer on [lo, hi] inclusive.
    long long next_int(long long lo, long long hi) {
        if (hi < lo) throw DomainError("rng: empty integer range");
        return lo + static_cast<long long>(next_below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Standard normal via Box-Muller; second value of the pair is cached.
    double next_normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(t);
        has_cached_ = true;
        return r * std::cos(t);
    }

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), order as drawn.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n) throw DomainError("rng: sample size exceeds population");
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<std::size_t> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(next_below(n - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace marketdef
