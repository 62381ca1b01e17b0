#include "topomorph/proxy.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace topomorph {

namespace {

void check_finite(const Proxy& p, const char* which) {
    for (double v : p.logits)
        if (!std::isfinite(v))
            throw std::domain_error(std::string("proxy ") + which + ": non-finite logit");
}

}  // namespace

Proxy compute_proxy(const ModelParams& model, const GlobalDataset& data) {
    if (model.dims != data.dims)
        throw std::invalid_argument("compute_proxy: model dims do not match dataset dims");
    Proxy p;
    p.samples = data.samples;
    p.classes = model.classes;
    p.logits.resize(p.samples * p.classes);
    for (std::size_t i = 0; i < data.samples; ++i)
        logits_into(model, data.features.data() + i * data.dims, p.logits.data() + i * p.classes);
    return p;
}

void softmax_row(const double* logits, std::size_t n, double* out) {
    double mx = logits[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, logits[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = std::exp(logits[j] - mx);
        sum += out[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
        out[j] /= sum;
        if (out[j] < 1e-12) out[j] = 1e-12;
    }
}

double kl_divergence(const Proxy& p, const Proxy& q) {
    if (p.samples != q.samples || p.classes != q.classes)
        throw std::invalid_argument("kl_divergence: proxy shapes differ");
    if (p.samples == 0 || p.classes == 0)
        throw std::invalid_argument("kl_divergence: empty proxy");
    check_finite(p, "p");
    check_finite(q, "q");

    std::vector<double> sp(p.classes), sq(p.classes);
    double total = 0.0;
    for (std::size_t i = 0; i < p.samples; ++i) {
        softmax_row(p.logits.data() + i * p.classes, p.classes, sp.data());
        softmax_row(q.logits.data() + i * q.classes, q.classes, sq.data());
        double row = 0.0;
        for (std::size_t j = 0; j < p.classes; ++j) row += sp[j] * std::log(sp[j] / sq[j]);
        total += row;
    }
    return total / static_cast<double>(p.samples);
}

double pair_similarity(const Proxy& p, const Proxy& q) {
    return (kl_divergence(p, q) + kl_divergence(q, p)) / 2.0;
}

std::vector<std::uint8_t> serialize_proxy(const Proxy& p) {
    std::vector<std::uint8_t> out(proxy_wire_bytes(p.samples, p.classes));
    std::uint64_t g = p.samples, c = p.classes;
    std::memcpy(out.data(), &g, 8);
    std::memcpy(out.data() + 8, &c, 8);
    std::memcpy(out.data() + 16, p.logits.data(), p.logits.size() * 8);
    return out;
}

Proxy deserialize_proxy(const std::uint8_t* data, std::size_t size) {
    if (size < 16) throw std::invalid_argument("proxy: truncated header");
    std::uint64_t g = 0, c = 0;
    std::memcpy(&g, data, 8);
    std::memcpy(&c, data + 8, 8);
    if (size != proxy_wire_bytes(g, c)) throw std::invalid_argument("proxy: size mismatch");
    Proxy p;
    p.samples = g;
    p.classes = c;
    p.logits.resize(g * c);
    std::memcpy(p.logits.data(), data + 16, p.logits.size() * 8);
    return p;
}

}  // namespace topomorph
