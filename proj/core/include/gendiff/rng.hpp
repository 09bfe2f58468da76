#ifndef GENDIFF_RNG_HPP
#define GENDIFF_RNG_HPP

#include <cstdint>
#include <cmath>

namespace gendiff {

/// Counter-keyed random stream: (master seed, stream id) fully determines the
/// sequence, so parallel scheduling cannot change Monte-Carlo results.
/// xoshiro256++ core seeded through splitmix64.
class Rng {
public:
    Rng(std::uint64_t master_seed, std::uint64_t stream_id) {
        std::uint64_t z = master_seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
        for (auto& word : state_) {
            z = splitmix(z);
            word = z;
        }
        // avoid the all-zero state (probability ~0, but cheap to rule out)
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on (0, 1] (never exactly 0, so logs are safe).
    double uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal draw, Marsaglia polar method with caching.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * factor;
        has_cached_ = true;
        return u * factor;
    }

    /// Exponential with the given rate.
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    /// Bernoulli(p).
    bool bernoulli(double p) { return uniform() <= p; }

private:
    static std::uint64_t splitmix(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace gendiff

#endif
