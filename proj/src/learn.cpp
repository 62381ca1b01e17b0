#include "topomorph/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "topomorph/proxy.hpp"
#include "topomorph/rng.hpp"

namespace topomorph {

PartitionFlavor partition_flavor_from_string(const std::string& s) {
    if (s == "label2") return PartitionFlavor::label2;
    if (s == "labeldir") return PartitionFlavor::labeldir;
    if (s == "quantity_skew") return PartitionFlavor::quantity_skew;
    if (s == "feat_noise") return PartitionFlavor::feat_noise;
    if (s == "mixed") return PartitionFlavor::mixed;
    throw std::invalid_argument("unknown partition flavor: " + s);
}

std::string to_string(PartitionFlavor f) {
    switch (f) {
        case PartitionFlavor::label2: return "label2";
        case PartitionFlavor::labeldir: return "labeldir";
        case PartitionFlavor::quantity_skew: return "quantity_skew";
        case PartitionFlavor::feat_noise: return "feat_noise";
        case PartitionFlavor::mixed: return "mixed";
    }
    return "?";
}

namespace {
constexpr double kBlobRadius = 3.0;
}

Dataset synth_dataset(std::uint32_t classes, std::uint32_t dims, std::uint32_t per_class,
                      double center_shift, std::uint64_t seed) {
    if (classes < 2 || dims < 2 || per_class < 1)
        throw std::invalid_argument("synth_dataset: need classes >= 2, dims >= 2, per_class >= 1");
    Rng rng(mix_seed(seed, 0x64617461));  // "data"

    auto unit_direction = [&]() {
        std::vector<double> d(dims);
        double norm = 0.0;
        for (double& x : d) {
            x = rng.normal();
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            d[0] = 1.0;
            norm = 1.0;
        }
        for (double& x : d) x /= norm;
        return d;
    };

    std::vector<std::vector<double>> centers(classes);
    for (auto& c : centers) {
        c = unit_direction();
        for (double& x : c) x *= kBlobRadius;
    }
    // Drawn regardless of shift so only the features move when it changes.
    const std::vector<double> shift_dir = unit_direction();

    Dataset out;
    out.dims = dims;
    out.classes = classes;
    out.features.reserve(static_cast<std::size_t>(classes) * per_class * dims);
    out.labels.reserve(static_cast<std::size_t>(classes) * per_class);
    for (std::uint32_t c = 0; c < classes; ++c) {
        for (std::uint32_t s = 0; s < per_class; ++s) {
            for (std::uint32_t d = 0; d < dims; ++d)
                out.features.push_back(centers[c][d] + center_shift * shift_dir[d] + rng.normal());
            out.labels.push_back(c);
        }
    }
    return out;
}

namespace {

std::vector<Dataset> empty_parts(const Dataset& data, std::uint32_t n) {
    std::vector<Dataset> parts(n);
    for (auto& p : parts) {
        p.dims = data.dims;
        p.classes = data.classes;
    }
    return parts;
}

void push_sample(Dataset& part, const Dataset& data, std::size_t i) {
    part.features.insert(part.features.end(), data.row(i), data.row(i) + data.dims);
    part.labels.push_back(data.labels[i]);
}

// Largest-remainder rounding of proportions to integer counts summing to total.
std::vector<std::size_t> proportional_counts(const std::vector<double>& props, std::size_t total) {
    const std::size_t n = props.size();
    std::vector<std::size_t> counts(n);
    std::vector<std::pair<double, std::size_t>> remainders(n);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double exact = props[i] * static_cast<double>(total);
        counts[i] = static_cast<std::size_t>(exact);
        remainders[i] = {exact - static_cast<double>(counts[i]), i};
        assigned += counts[i];
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t j = 0; assigned < total; ++j, ++assigned) ++counts[remainders[j % n].second];
    return counts;
}

std::vector<std::vector<std::size_t>> indices_by_class(const Dataset& data) {
    std::vector<std::vector<std::size_t>> by_class(data.classes);
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] >= data.classes)
            throw std::invalid_argument("partition: label out of range");
        by_class[data.labels[i]].push_back(i);
    }
    return by_class;
}

// Class assignment for label-quantity skew: a stream of repeated class
// permutations is dealt classes_per_node slots per node, which covers every
// class whenever slot count permits; within-node duplicates are repaired by
// swapping with a later slot.
std::vector<std::vector<std::uint32_t>> assign_label2_classes(std::uint32_t n, std::uint32_t classes,
                                                              std::uint32_t per_node, Rng& rng) {
    const std::size_t slots = static_cast<std::size_t>(n) * per_node;
    std::vector<std::uint32_t> stream;
    stream.reserve(slots + classes);
    while (stream.size() < slots) {
        std::vector<std::uint32_t> perm(classes);
        std::iota(perm.begin(), perm.end(), 0u);
        rng.shuffle(perm);
        stream.insert(stream.end(), perm.begin(), perm.end());
    }
    stream.resize(slots);

    auto node_of = [per_node](std::size_t slot) { return slot / per_node; };
    for (std::size_t i = 0; i < slots; ++i) {
        const std::size_t node_begin = node_of(i) * per_node;
        bool dup = false;
        for (std::size_t j = node_begin; j < i; ++j) dup |= stream[j] == stream[i];
        if (!dup) continue;
        for (std::size_t s = i + 1; s < slots; ++s) {
            bool ok_here = true;
            for (std::size_t j = node_begin; j < i; ++j) ok_here &= stream[j] != stream[s];
            if (!ok_here) continue;
            const std::size_t other_begin = node_of(s) * per_node;
            bool ok_there = true;
            for (std::size_t j = other_begin; j < node_of(s) * per_node + per_node; ++j)
                ok_there &= j == s || stream[j] != stream[i];
            if (ok_there) {
                std::swap(stream[i], stream[s]);
                break;
            }
        }
    }

    std::vector<std::vector<std::uint32_t>> assigned(n);
    std::vector<bool> covered(classes, false);
    for (std::size_t i = 0; i < slots; ++i) {
        assigned[node_of(i)].push_back(stream[i]);
        covered[stream[i]] = true;
    }
    // Fewer slots than classes: hand leftover classes out round-robin so no
    // sample is orphaned.
    std::size_t next_node = 0;
    for (std::uint32_t c = 0; c < classes; ++c) {
        if (covered[c]) continue;
        assigned[next_node % n].push_back(c);
        ++next_node;
    }
    return assigned;
}

std::vector<Dataset> try_partition(const Dataset& data, const PartitionSpec& spec, std::uint32_t n,
                                   std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x70617274));  // "part"
    std::vector<Dataset> parts = empty_parts(data, n);

    const auto split_class_among = [&](const std::vector<std::size_t>& class_indices,
                                       const std::vector<std::size_t>& counts,
                                       const std::vector<std::uint32_t>& holders) {
        std::vector<std::size_t> shuffled = class_indices;
        rng.shuffle(shuffled);
        std::size_t at = 0;
        for (std::size_t h = 0; h < holders.size(); ++h)
            for (std::size_t j = 0; j < counts[h]; ++j) push_sample(parts[holders[h]], data, shuffled[at++]);
    };

    switch (spec.flavor) {
        case PartitionFlavor::label2: {
            const auto by_class = indices_by_class(data);
            const auto assigned = assign_label2_classes(n, static_cast<std::uint32_t>(data.classes),
                                                        spec.classes_per_node, rng);
            std::vector<std::vector<std::uint32_t>> holders(data.classes);
            for (std::uint32_t v = 0; v < n; ++v) {
                auto uniq = assigned[v];
                std::sort(uniq.begin(), uniq.end());
                uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
                for (std::uint32_t c : uniq) holders[c].push_back(v);
            }
            for (std::size_t c = 0; c < data.classes; ++c) {
                if (holders[c].empty()) continue;
                const std::size_t a = holders[c].size();
                std::vector<std::size_t> counts(a, by_class[c].size() / a);
                for (std::size_t i = 0; i < by_class[c].size() % a; ++i) ++counts[i];
                split_class_among(by_class[c], counts, holders[c]);
            }
            break;
        }
        case PartitionFlavor::labeldir:
        case PartitionFlavor::mixed: {
            const auto by_class = indices_by_class(data);
            std::vector<std::uint32_t> all_nodes(n);
            std::iota(all_nodes.begin(), all_nodes.end(), 0u);
            for (std::size_t c = 0; c < data.classes; ++c) {
                const auto props = dirichlet(rng, spec.beta, n);
                split_class_among(by_class[c], proportional_counts(props, by_class[c].size()),
                                  all_nodes);
            }
            break;
        }
        case PartitionFlavor::quantity_skew: {
            std::vector<std::size_t> all(data.size());
            std::iota(all.begin(), all.end(), std::size_t{0});
            rng.shuffle(all);
            const auto props = dirichlet(rng, spec.beta, n);
            const auto counts = proportional_counts(props, data.size());
            std::size_t at = 0;
            for (std::uint32_t v = 0; v < n; ++v)
                for (std::size_t j = 0; j < counts[v]; ++j) push_sample(parts[v], data, all[at++]);
            break;
        }
        case PartitionFlavor::feat_noise: {
            std::vector<std::size_t> all(data.size());
            std::iota(all.begin(), all.end(), std::size_t{0});
            rng.shuffle(all);
            std::size_t at = 0;
            for (std::uint32_t v = 0; v < n; ++v) {
                std::size_t count = data.size() / n + (v < data.size() % n ? 1 : 0);
                for (std::size_t j = 0; j < count; ++j) push_sample(parts[v], data, all[at++]);
            }
            break;
        }
    }

    if (spec.flavor == PartitionFlavor::feat_noise || spec.flavor == PartitionFlavor::mixed) {
        // Node v's features pick up zero-mean noise with variance eta*v/n.
        for (std::uint32_t v = 1; v < n; ++v) {
            const double sigma = std::sqrt(spec.eta * static_cast<double>(v) / n);
            for (double& x : parts[v].features) x += sigma * rng.normal();
        }
    }
    return parts;
}

}  // namespace

std::vector<Dataset> partition_data(const Dataset& data, const PartitionSpec& spec, std::uint32_t n,
                                    std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("partition: need at least one node");
    if (data.size() == 0) throw std::invalid_argument("partition: empty dataset");
    for (int attempt = 0; attempt < 10; ++attempt) {
        auto parts = try_partition(data, spec, n, mix_seed(seed, 0x72747279, attempt));
        const bool ok = std::all_of(parts.begin(), parts.end(),
                                    [](const Dataset& d) { return d.size() > 0; });
        if (ok) return parts;
    }
    throw std::runtime_error("partition: a node received no samples after 10 attempts");
}

double ce_loss(const ModelParams& params, const Dataset& data) {
    std::vector<double> logits(params.classes), probs(params.classes);
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        logits_into(params, data.row(i), logits.data());
        softmax_row(logits.data(), params.classes, probs.data());
        total -= std::log(probs[data.labels[i]]);
    }
    return total / static_cast<double>(data.size());
}

void ce_gradient(const ModelParams& params, const Dataset& data, ModelParams& grad) {
    grad = ModelParams::zeros(params.classes, params.dims);
    std::vector<double> logits(params.classes), probs(params.classes);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double* x = data.row(i);
        logits_into(params, x, logits.data());
        softmax_row(logits.data(), params.classes, probs.data());
        probs[data.labels[i]] -= 1.0;
        for (std::size_t c = 0; c < params.classes; ++c) {
            double* gw = grad.W.data() + c * params.dims;
            for (std::size_t d = 0; d < params.dims; ++d) gw[d] += probs[c] * x[d];
            grad.b[c] += probs[c];
        }
    }
    const double inv = 1.0 / static_cast<double>(data.size());
    for (double& g : grad.W) g *= inv;
    for (double& g : grad.b) g *= inv;
}

ModelParams sgd_train(ModelParams params, const Dataset& data, std::uint32_t epochs, double lr,
                      std::uint32_t batch, std::uint64_t seed) {
    if (data.size() == 0) throw std::invalid_argument("sgd_train: empty dataset");
    if (params.dims != data.dims) throw std::invalid_argument("sgd_train: dimension mismatch");
    if (batch < 1) throw std::invalid_argument("sgd_train: batch size must be >= 1");

    Rng rng(mix_seed(seed, 0x73676420));  // "sgd "
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> logits(params.classes), probs(params.classes);
    std::vector<double> gW(params.classes * params.dims), gb(params.classes);

    for (std::uint32_t e = 0; e < epochs; ++e) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            std::fill(gW.begin(), gW.end(), 0.0);
            std::fill(gb.begin(), gb.end(), 0.0);
            for (std::size_t i = start; i < end; ++i) {
                const double* x = data.row(order[i]);
                logits_into(params, x, logits.data());
                softmax_row(logits.data(), params.classes, probs.data());
                probs[data.labels[order[i]]] -= 1.0;
                for (std::size_t c = 0; c < params.classes; ++c) {
                    double* g = gW.data() + c * params.dims;
                    for (std::size_t d = 0; d < params.dims; ++d) g[d] += probs[c] * x[d];
                    gb[c] += probs[c];
                }
            }
            const double step = lr / static_cast<double>(end - start);
            for (std::size_t j = 0; j < gW.size(); ++j) params.W[j] -= step * gW[j];
            for (std::size_t c = 0; c < params.classes; ++c) params.b[c] -= step * gb[c];
        }
    }
    return params;
}

ModelParams fedavg_aggregate(const ModelParams& own,
                             const std::vector<const ModelParams*>& neighbors) {
    for (const ModelParams* nb : neighbors)
        if (!own.same_shape(*nb)) throw std::invalid_argument("fedavg: parameter shapes differ");
    ModelParams out = own;
    for (const ModelParams* nb : neighbors) {
        for (std::size_t i = 0; i < out.W.size(); ++i) out.W[i] += nb->W[i];
        for (std::size_t i = 0; i < out.b.size(); ++i) out.b[i] += nb->b[i];
    }
    const double inv = 1.0 / static_cast<double>(neighbors.size() + 1);
    for (double& w : out.W) w *= inv;
    for (double& b : out.b) b *= inv;
    return out;
}

double evaluate(const ModelParams& params, const Dataset& test) {
    if (test.size() == 0) throw std::invalid_argument("evaluate: empty test set");
    if (params.dims != test.dims) throw std::invalid_argument("evaluate: dimension mismatch");
    std::vector<double> logits(params.classes);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        logits_into(params, test.row(i), logits.data());
        std::size_t arg = 0;
        for (std::size_t c = 1; c < params.classes; ++c)
            if (logits[c] > logits[arg]) arg = c;  // ties keep the lowest index
        if (arg == test.labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

std::vector<Phase3Metrics> train_phase3(const Topology& t, const CliquePlan& plan,
                                        const std::vector<Dataset>& locals, const Dataset& test,
                                        const TrainConfig& cfg,
                                        const std::vector<ModelParams>& initial) {
    for (NodeId v : plan.participants) {
        if (v >= locals.size() || locals[v].size() == 0)
            throw std::runtime_error("phase3: participant " + std::to_string(v) + " has no data");
        if (v >= initial.size())
            throw std::runtime_error("phase3: participant " + std::to_string(v) + " has no params");
    }

    std::vector<ModelParams> params(initial);
    std::vector<ModelParams> trained(params.size());
    const std::uint64_t wire =
        params_wire_bytes(initial[plan.participants.front()].classes,
                          initial[plan.participants.front()].dims);

    std::vector<Phase3Metrics> metrics;
    for (std::uint32_t round = 1; round <= cfg.rounds; ++round) {
        // One shared shuffle seed per round: nodes with identical data and
        // identical incoming params stay in lockstep.
        const std::uint64_t round_seed = mix_seed(cfg.seed, 0x70333264, round);
        for (NodeId v : plan.participants)
            trained[v] = sgd_train(params[v], locals[v], cfg.local_epochs, cfg.learning_rate,
                                   cfg.batch_size, round_seed);

        Phase3Metrics m;
        m.round = round;
        m.min_accuracy = 1.0;
        double sum = 0.0;
        for (NodeId v : plan.participants) {
            std::vector<const ModelParams*> nbrs;
            for (NodeId u : t.neighbors(v)) nbrs.push_back(&trained[u]);
            params[v] = fedavg_aggregate(trained[v], nbrs);
            m.bytes_downloaded += nbrs.size() * wire;
            const double acc = evaluate(params[v], test);
            sum += acc;
            m.min_accuracy = std::min(m.min_accuracy, acc);
            m.max_accuracy = std::max(m.max_accuracy, acc);
        }
        m.mean_accuracy = sum / static_cast<double>(plan.participants.size());
        metrics.push_back(m);
    }
    return metrics;
}

}  // namespace topomorph
