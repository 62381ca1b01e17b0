#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "topomorph/proxy.hpp"
#include "topomorph/rng.hpp"

using namespace topomorph;

namespace {

Proxy make_proxy(std::size_t samples, std::size_t classes, std::vector<double> logits) {
    Proxy p;
    p.samples = samples;
    p.classes = classes;
    p.logits = std::move(logits);
    return p;
}

// Independent high-precision oracle: direct softmax + summation in long
// double, no shared code with the implementation.
long double kl_oracle(const Proxy& p, const Proxy& q) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < p.samples; ++i) {
        const double* lp = p.logits.data() + i * p.classes;
        const double* lq = q.logits.data() + i * q.classes;
        long double zp = 0.0L, zq = 0.0L;
        for (std::size_t j = 0; j < p.classes; ++j) {
            zp += std::exp(static_cast<long double>(lp[j]));
            zq += std::exp(static_cast<long double>(lq[j]));
        }
        for (std::size_t j = 0; j < p.classes; ++j) {
            const long double a = std::exp(static_cast<long double>(lp[j])) / zp;
            const long double b = std::exp(static_cast<long double>(lq[j])) / zq;
            total += a * std::log(a / b);
        }
    }
    return total / static_cast<long double>(p.samples);
}

Proxy random_proxy(Rng& rng, std::size_t samples, std::size_t classes, double scale) {
    std::vector<double> logits(samples * classes);
    for (double& x : logits) x = scale * rng.normal();
    return make_proxy(samples, classes, std::move(logits));
}

}  // namespace

TEST_CASE("compute_proxy: zero weights give all-zero logits") {
    GlobalDataset data{2, 3, {1.0, 2.0, 3.0, -1.0, 0.5, 2.0}};
    const Proxy p = compute_proxy(ModelParams::zeros(4, 3), data);
    CHECK(p.samples == 2);
    CHECK(p.classes == 4);
    for (double v : p.logits) CHECK(v == 0.0);
}

TEST_CASE("compute_proxy: known weights reproduce the matrix-multiply oracle") {
    GlobalDataset data{1, 2, {2.0, -1.0}};
    ModelParams m = ModelParams::zeros(2, 2);
    m.W = {1.0, 2.0, -0.5, 3.0};
    m.b = {0.25, -1.0};
    const Proxy p = compute_proxy(m, data);
    CHECK(p.logits[0] == doctest::Approx(1.0 * 2.0 + 2.0 * -1.0 + 0.25));
    CHECK(p.logits[1] == doctest::Approx(-0.5 * 2.0 + 3.0 * -1.0 - 1.0));
}

TEST_CASE("compute_proxy: identical models give identical proxies") {
    Rng rng(1);
    GlobalDataset data{4, 5, {}};
    data.features.resize(20);
    for (double& x : data.features) x = rng.normal();
    ModelParams m = ModelParams::zeros(3, 5);
    for (double& w : m.W) w = rng.normal();
    const Proxy a = compute_proxy(m, data);
    const Proxy b = compute_proxy(m, data);
    CHECK(a.logits == b.logits);
}

TEST_CASE("compute_proxy rejects dimension mismatch") {
    GlobalDataset data{1, 3, {0, 0, 0}};
    CHECK_THROWS_AS(compute_proxy(ModelParams::zeros(2, 4), data), std::invalid_argument);
}

TEST_CASE("kl_divergence frozen oracle values") {
    // softmax(p) = (0.5, 0.5), softmax(q) = (0.9, 0.1).
    const Proxy p = make_proxy(1, 2, {0.0, 0.0});
    const Proxy q = make_proxy(1, 2, {std::log(9.0), 0.0});
    // Values frozen from the high-precision direct-summation oracle.
    CHECK(kl_divergence(p, q) == doctest::Approx(0.51082562376599068).epsilon(1e-12));
    CHECK(kl_divergence(q, p) == doctest::Approx(0.36806420716849707).epsilon(1e-12));
    // Asymmetry.
    CHECK(kl_divergence(p, q) != kl_divergence(q, p));
    // Symmetrized value from the two oracle numbers.
    CHECK(pair_similarity(p, q) == doctest::Approx(0.43944491546724388).epsilon(1e-12));
}

TEST_CASE("kl_divergence identity is exactly zero") {
    Rng rng(2);
    for (int rep = 0; rep < 20; ++rep) {
        const Proxy p = random_proxy(rng, 6, 4, 2.0);
        CHECK(kl_divergence(p, p) == 0.0);
        CHECK(pair_similarity(p, p) == 0.0);
    }
}

TEST_CASE("kl_divergence nonnegativity property over 1000 random pairs") {
    Rng rng(3);
    for (int rep = 0; rep < 1000; ++rep) {
        const Proxy p = random_proxy(rng, 3, 5, 3.0);
        const Proxy q = random_proxy(rng, 3, 5, 3.0);
        CHECK(kl_divergence(p, q) >= 0.0);
    }
}

TEST_CASE("kl_divergence matches the long-double oracle on random pairs") {
    Rng rng(4);
    for (int rep = 0; rep < 200; ++rep) {
        const Proxy p = random_proxy(rng, 4, 6, 2.5);
        const Proxy q = random_proxy(rng, 4, 6, 2.5);
        const double got = kl_divergence(p, q);
        const double want = static_cast<double>(kl_oracle(p, q));
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("pair_similarity is bitwise symmetric") {
    Rng rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        const Proxy p = random_proxy(rng, 4, 3, 2.0);
        const Proxy q = random_proxy(rng, 4, 3, 2.0);
        CHECK(pair_similarity(p, q) == pair_similarity(q, p));
    }
}

TEST_CASE("softmax rows sum to one within 1e-12") {
    Rng rng(6);
    std::vector<double> probs(7);
    for (int rep = 0; rep < 200; ++rep) {
        const Proxy p = random_proxy(rng, 1, 7, 5.0);
        softmax_row(p.logits.data(), 7, probs.data());
        double total = 0;
        for (double x : probs) total += x;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("kl_divergence error paths") {
    const Proxy p = make_proxy(1, 2, {0.0, 0.0});
    const Proxy q = make_proxy(1, 3, {0.0, 0.0, 0.0});
    CHECK_THROWS_AS(kl_divergence(p, q), std::invalid_argument);
    Proxy bad = make_proxy(1, 2, {0.0, std::numeric_limits<double>::infinity()});
    CHECK_THROWS_AS(kl_divergence(p, bad), std::domain_error);
}

TEST_CASE("saturated logits stay finite through the probability floor") {
    const Proxy p = make_proxy(1, 2, {0.0, 0.0});
    const Proxy q = make_proxy(1, 2, {1000.0, -1000.0});
    const double v = kl_divergence(p, q);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
}

TEST_CASE("proxy wire format round-trips and matches the size formula") {
    Rng rng(7);
    const Proxy p = random_proxy(rng, 5, 3, 1.0);
    const auto bytes = serialize_proxy(p);
    CHECK(bytes.size() == proxy_wire_bytes(5, 3));
    CHECK(bytes.size() == 16 + 8 * 5 * 3);
    const Proxy back = deserialize_proxy(bytes.data(), bytes.size());
    CHECK(back.samples == p.samples);
    CHECK(back.classes == p.classes);
    CHECK(back.logits == p.logits);
}
