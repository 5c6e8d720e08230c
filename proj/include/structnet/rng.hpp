#pragma once
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <structnet/linalg.hpp>

namespace structnet::rng {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * Seed of the named substream `role` under a top-level seed: FNV-1a of the
 * role name, xor-ed with the seed and passed through splitmix64. Each role
 * (e.g. "labels", "edges", "signs", "gaussian") draws from its own stream, so
 * adding draws to one role never shifts the others.
 */
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view role)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : role) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(seed ^ splitmix64(h));
}

/// Portable stream: mt19937_64 engine with hand-written distributions.
class Stream
{
public:
    Stream(std::uint64_t seed, std::string_view role)
        : eng_(substream_seed(seed, role))
    {}

    std::uint64_t next() { return eng_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()
                                    - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double prob) { return uniform() < prob; }

    /// Standard normal by the Marsaglia polar method.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Index drawn with probability proportional to `weights` (nonnegative, positive sum).
    Index categorical(const Vector<double>& weights)
    {
        const double total = weights.sum();
        const double u = uniform() * total;
        double acc = 0;
        for (Index i = 0; i < weights.size(); ++i) {
            acc += weights(i);
            if (u < acc) return i;
        }
        for (Index i = weights.size() - 1; i >= 0; --i)
            if (weights(i) > 0) return i;
        return 0;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0;
    bool has_spare_ = false;
};

} // namespace structnet::rng
