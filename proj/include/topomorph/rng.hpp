#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace topomorph {

// splitmix64 step; used for seed mixing and label hashing.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Mixes a master seed with up to two stream indices into an independent
// sub-seed. Stateless, so derivations are order-free and reproducible.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= a * 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b * 0xc2b2ae3d27d4eb4fULL;
    h ^= splitmix64(s);
    return h;
}

// Stable seed derivation from a master seed and a textual label:
// FNV-1a 64-bit over the label bytes, then mixed with the master seed
// through splitmix64. Documented so runs replicate across machines.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix_seed(master, h);
}

// Deterministic random source. std::mt19937_64 output is pinned by the
// standard; every sampling routine on top of it is implemented here rather
// than with std::*_distribution, whose algorithms vary between standard
// libraries. Streams are therefore identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, n) via rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform double in (0, 1]; safe as a log/pow argument.
    double unit_pos() { return 1.0 - unit(); }

    // Standard normal via Box-Muller; the paired deviate is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = unit_pos();
        const double u2 = unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Gamma(alpha, 1) via Marsaglia-Tsang; alpha < 1 handled by boosting.
    double gamma(double alpha) {
        if (alpha < 1.0) {
            const double g = gamma(alpha + 1.0);
            return g * std::pow(unit_pos(), 1.0 / alpha);
        }
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = unit_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Fisher-Yates shuffle using below().
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Dirichlet(concentration, ..., concentration) over k categories.
inline std::vector<double> dirichlet(Rng& rng, double concentration, std::size_t k) {
    std::vector<double> p(k);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        p[i] = rng.gamma(concentration);
        total += p[i];
    }
    if (total <= 0.0) {
        // All mass collapsed below double precision; fall back to a point mass.
        p.assign(k, 0.0);
        p[static_cast<std::size_t>(rng.below(k))] = 1.0;
        return p;
    }
    for (double& x : p) x /= total;
    return p;
}

}  // namespace topomorph
