#pragma once

#include <cstddef>
#include <vector>

namespace topomorph {

// Multinomial logistic regression parameters: W is classes x dims
// (row-major), b is one bias per class.
struct ModelParams {
    std::size_t classes = 0;
    std::size_t dims = 0;
    std::vector<double> W;
    std::vector<double> b;

    static ModelParams zeros(std::size_t classes, std::size_t dims) {
        ModelParams p;
        p.classes = classes;
        p.dims = dims;
        p.W.assign(classes * dims, 0.0);
        p.b.assign(classes, 0.0);
        return p;
    }

    bool same_shape(const ModelParams& o) const {
        return classes == o.classes && dims == o.dims;
    }
};

// out[c] = W[c] . x + b[c]
inline void logits_into(const ModelParams& p, const double* x, double* out) {
    for (std::size_t c = 0; c < p.classes; ++c) {
        const double* w = p.W.data() + c * p.dims;
        double acc = p.b[c];
        for (std::size_t d = 0; d < p.dims; ++d) acc += w[d] * x[d];
        out[c] = acc;
    }
}

// Wire size of serialized parameters: (rows, cols) header + one double per
// entry of the [W | b] block.
inline std::uint64_t params_wire_bytes(std::size_t classes, std::size_t dims) {
    return 16 + 8ull * classes * (dims + 1);
}

}  // namespace topomorph
