#pragma once

// Self-contained deterministic RNG and variate generation. Owning the
// bit-stream (rather than using std:: distributions) keeps Monte Carlo
// results bit-identical across platforms, standard-library versions,
// thread counts, and chunk sizes.

#include <cmath>
#include <cstdint>

namespace fsoegc {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ seeded through splitmix64
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        have_spare_ = false;
    }

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

    // uniform in (0,1); never exactly 0 so logs and powers stay finite
    double uniform() {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    // standard normal via the Marsaglia polar method (cached pair)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
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
        have_spare_ = true;
        return u * f;
    }

    // unit-scale Gamma variate, Marsaglia-Tsang squeeze for shape >= 1 and
    // the u^{1/shape} boost for shape < 1
    double gamma(double shape) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_;
};

// independent substream for a numbered block of work
inline Rng substream(std::uint64_t seed, std::uint64_t block_index) {
    std::uint64_t sm = seed;
    const std::uint64_t k1 = splitmix64(sm);
    std::uint64_t mix = k1 ^ (block_index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    return Rng(splitmix64(mix));
}

}  // namespace fsoegc
