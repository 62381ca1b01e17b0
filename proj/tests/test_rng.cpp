#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include "topomorph/rng.hpp"

using namespace topomorph;

TEST_CASE("rng streams are reproducible") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("below stays in range over many draws") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const std::uint64_t n = 1 + rng.below(1000);
        CHECK(rng.below(n) < n);
    }
}

TEST_CASE("derive_seed: same inputs agree, labels separate") {
    CHECK(derive_seed(1, "morph") == derive_seed(1, "morph"));
    CHECK(derive_seed(1, "morph") != derive_seed(1, "train"));
    CHECK(derive_seed(1, "morph") != derive_seed(2, "morph"));
}

TEST_CASE("derive_seed: no collisions across 10^4 labels") {
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 10000; ++i) seen.insert(derive_seed(99, "label-" + std::to_string(i)));
    CHECK(seen.size() == 10000);
}

TEST_CASE("normal deviates have roughly standard moments") {
    Rng rng(3);
    double sum = 0, sum2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sum2 += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}

TEST_CASE("dirichlet draws normalize and respect concentration") {
    Rng rng(5);
    for (double beta : {0.1, 0.5, 10.0}) {
        for (int rep = 0; rep < 50; ++rep) {
            const auto p = dirichlet(rng, beta, 8);
            double total = 0;
            for (double x : p) {
                CHECK(x >= 0.0);
                total += x;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    // Large concentration concentrates near uniform.
    const auto p = dirichlet(rng, 1e6, 10);
    for (double x : p) CHECK(std::abs(x - 0.1) < 0.005);
}

TEST_CASE("gamma sampler matches the distribution mean") {
    Rng rng(11);
    for (double alpha : {0.3, 1.0, 4.5}) {
        double sum = 0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) sum += rng.gamma(alpha);
        CHECK(sum / n == doctest::Approx(alpha).epsilon(0.03));
    }
}
