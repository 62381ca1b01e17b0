#pragma once

#include <cstdint>
#include <vector>

#include "topomorph/model.hpp"

namespace topomorph {

// Unlabeled dataset shared identically by every node; proxies are model
// outputs on these samples. Row-major samples x dims.
struct GlobalDataset {
    std::size_t samples = 0;
    std::size_t dims = 0;
    std::vector<double> features;
};

// A model's raw outputs (logits) on the global dataset, samples x classes.
struct Proxy {
    std::size_t samples = 0;
    std::size_t classes = 0;
    std::vector<double> logits;
};

Proxy compute_proxy(const ModelParams& model, const GlobalDataset& data);

// Mean over global samples of KL(softmax(p_i) || softmax(q_i)), natural log.
// Softmax uses max-subtraction; probabilities are floored at 1e-12 before
// the log. Zero exactly when the softmaxed rows coincide.
double kl_divergence(const Proxy& p, const Proxy& q);

// Symmetrized divergence (kl(p,q) + kl(q,p)) / 2. Callers pass operands in
// ascending node-id order so every site evaluates the same expression.
double pair_similarity(const Proxy& p, const Proxy& q);

// Fixed wire layout: (samples, classes) as two little-endian u64 words,
// then row-major doubles.
std::vector<std::uint8_t> serialize_proxy(const Proxy& p);
Proxy deserialize_proxy(const std::uint8_t* data, std::size_t size);

inline std::uint64_t proxy_wire_bytes(std::size_t samples, std::size_t classes) {
    return 16 + 8ull * samples * classes;
}

// softmax of one row with max-subtraction and the 1e-12 probability floor.
void softmax_row(const double* logits, std::size_t n, double* out);

}  // namespace topomorph
