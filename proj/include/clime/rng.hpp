#pragma once

#include <cmath>
#include <cstdint>

namespace clime {

// Deterministic, platform-independent random streams. Substreams are
// derived by hashing (master_seed, index) through splitmix64, so
// replications own independent streams regardless of execution order.

inline uint64_t splitmix64_next(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Substream seed r of a master seed.
inline uint64_t derive_stream(uint64_t master, uint64_t index) {
    uint64_t s = master;
    uint64_t a = splitmix64_next(s);
    s ^= index * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL;
    uint64_t b = splitmix64_next(s);
    return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

/// xoshiro256++ with splitmix64 seeding.
class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t s = seed;
        for (int i = 0; i < 4; ++i) state_[i] = splitmix64_next(s);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// uniform in (0, 1]
    double next_double_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// integer in [0, n)
    uint64_t next_below(uint64_t n) {
        // multiply-shift; bias is negligible for the n used here (n << 2^32)
        return static_cast<uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// standard normal via Box-Muller; caches the second deviate
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_double_pos();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Fisher-Yates shuffle of indices [0, n), deterministic given the stream.
template <typename IntVec>
inline void shuffle_indices(IntVec& idx, Rng& rng) {
    for (size_t i = idx.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(idx[i - 1], idx[j]);
    }
}

} // namespace clime
