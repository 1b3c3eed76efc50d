#pragma once

#include <cmath>
#include <cstdint>

namespace crnstab {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seeded, indexed random stream (xoshiro256++ with splitmix64 seeding).
/// Distinct (seed, stream) pairs give independent streams; the same pair
/// reproduces the same sequence. Distributions are generated from explicit
/// formulas, so sampled trajectories do not depend on the standard library
/// implementation.
class RngStream {
public:
    RngStream() : RngStream(1, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        for (auto& s : s_) s = splitmix64(x);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on the open interval (0,1); never returns 0 or 1, so it is
    /// safe inside log().
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Exponential with unit rate.
    double exponential() { return -std::log(uniform()); }

    /// Exponential with the given rate.
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    /// Standard normal (Box-Muller, pairs cached).
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t s_[4];
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Replica i of a Monte Carlo experiment draws from stream (seed, base + i),
/// so results are reproducible and independent of worker scheduling.
struct RngLayout {
    std::uint64_t seed = 1;
    std::uint64_t base = 0;

    RngStream at(std::uint64_t i) const { return RngStream(seed, base + i); }
};

}  // namespace crnstab
