#include "topomorph/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "topomorph/rng.hpp"

namespace topomorph {

nlohmann::json CliquePlan::to_json(std::uint32_t k, const std::vector<std::uint32_t>& labels) const {
    nlohmann::json j;
    j["k"] = k;
    j["labels"] = labels;
    auto cl = nlohmann::json::array();
    for (const auto& c : cliques) cl.push_back(c.members);
    j["cliques"] = std::move(cl);
    j["excluded"] = excluded;
    j["mode"] = mode;
    j["mixed_cliques"] = mixed_cliques;
    return j;
}

CliquePlan CliquePlan::from_json(const nlohmann::json& j) {
    CliquePlan plan;
    for (const auto& c : j.at("cliques")) plan.cliques.push_back(Clique{c.get<std::vector<NodeId>>()});
    plan.excluded = j.at("excluded").get<std::vector<NodeId>>();
    plan.mode = j.at("mode").get<std::string>();
    plan.mixed_cliques = j.at("mixed_cliques").get<std::vector<std::size_t>>();
    for (const auto& c : plan.cliques)
        plan.participants.insert(plan.participants.end(), c.members.begin(), c.members.end());
    std::sort(plan.participants.begin(), plan.participants.end());
    return plan;
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

CliquePlan finalize_plan(std::vector<Clique> cliques, std::uint32_t n, std::string mode,
                         std::vector<std::size_t> mixed) {
    CliquePlan plan;
    plan.cliques = std::move(cliques);
    plan.mode = std::move(mode);
    plan.mixed_cliques = std::move(mixed);
    std::vector<bool> in(n, false);
    for (const auto& c : plan.cliques)
        for (NodeId v : c.members) in[v] = true;
    for (NodeId v = 0; v < n; ++v) (in[v] ? plan.participants : plan.excluded).push_back(v);
    return plan;
}

// Cluster member lists in ascending node id, indexed by cluster label.
std::vector<std::vector<NodeId>> cluster_members(const ClusterAssignment& a) {
    std::vector<std::vector<NodeId>> members(a.k);
    for (NodeId v = 0; v < a.labels.size(); ++v) members[a.labels[v]].push_back(v);
    return members;
}

}  // namespace

ClusterAssignment kmeans_rows(const SimilarityMatrix& matrix, std::uint32_t k, std::uint64_t seed) {
    const std::uint32_t n = matrix.node_count();
    if (k < 1 || k > n) throw std::invalid_argument("kmeans: k must satisfy 1 <= k <= n");

    const std::vector<double> rows = matrix.dense_rows(/*impute_missing=*/true);
    const std::size_t dim = n;
    auto row = [&](std::uint32_t i) { return rows.data() + static_cast<std::size_t>(i) * dim; };

    Rng rng(mix_seed(seed, 0x6b6d6e73));  // "kmns"

    // k-means++ seeding.
    std::vector<double> centroids(static_cast<std::size_t>(k) * dim);
    std::vector<double> best_d2(n, std::numeric_limits<double>::infinity());
    auto centroid = [&](std::uint32_t c) { return centroids.data() + static_cast<std::size_t>(c) * dim; };
    std::uint32_t first = static_cast<std::uint32_t>(rng.below(n));
    std::copy_n(row(first), dim, centroid(0));
    for (std::uint32_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::uint32_t i = 0; i < n; ++i) {
            best_d2[i] = std::min(best_d2[i], sq_dist(row(i), centroid(c - 1), dim));
            total += best_d2[i];
        }
        std::uint32_t chosen;
        if (total <= 0.0) {
            chosen = static_cast<std::uint32_t>(rng.below(n));
        } else {
            const double target = rng.unit() * total;
            double acc = 0.0;
            chosen = n - 1;
            for (std::uint32_t i = 0; i < n; ++i) {
                acc += best_d2[i];
                if (acc > target) {
                    chosen = i;
                    break;
                }
            }
        }
        std::copy_n(row(chosen), dim, centroid(c));
    }

    ClusterAssignment out;
    out.k = k;
    out.labels.assign(n, 0);
    std::vector<double> dist_to_own(n, 0.0);
    std::vector<std::uint32_t> counts(k, 0);

    for (int iter = 0; iter < 100; ++iter) {
        // Assignment step; ties break toward the lowest cluster index.
        double inertia = 0.0;
        std::fill(counts.begin(), counts.end(), 0u);
        for (std::uint32_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::uint32_t arg = 0;
            for (std::uint32_t c = 0; c < k; ++c) {
                const double d = sq_dist(row(i), centroid(c), dim);
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            out.labels[i] = arg;
            dist_to_own[i] = best;
            inertia += best;
            ++counts[arg];
        }
        out.inertia_trace.push_back(inertia);

        // Repair empty clusters with the globally farthest point.
        for (std::uint32_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::uint32_t far = 0;
            double far_d = -1.0;
            for (std::uint32_t i = 0; i < n; ++i) {
                if (counts[out.labels[i]] <= 1) continue;  // do not drain singleton clusters
                if (dist_to_own[i] > far_d) {
                    far_d = dist_to_own[i];
                    far = i;
                }
            }
            --counts[out.labels[far]];
            out.labels[far] = c;
            ++counts[c];
            dist_to_own[far] = 0.0;
        }

        // Update step.
        std::vector<double> next(static_cast<std::size_t>(k) * dim, 0.0);
        for (std::uint32_t i = 0; i < n; ++i) {
            double* target = next.data() + static_cast<std::size_t>(out.labels[i]) * dim;
            const double* r = row(i);
            for (std::size_t d = 0; d < dim; ++d) target[d] += r[d];
        }
        double max_shift = 0.0;
        for (std::uint32_t c = 0; c < k; ++c) {
            double* target = next.data() + static_cast<std::size_t>(c) * dim;
            for (std::size_t d = 0; d < dim; ++d) target[d] /= counts[c];
            max_shift = std::max(max_shift, sq_dist(target, centroid(c), dim));
        }
        centroids.swap(next);
        if (std::sqrt(max_shift) < 1e-6) break;
    }

    out.centroids = std::move(centroids);
    return out;
}

SelectionResult ccc_heterogeneous(const ClusterAssignment& assignment,
                                  std::uint32_t samples_per_cluster, std::uint64_t seed) {
    if (samples_per_cluster < 1)
        throw std::invalid_argument("ccc: samples_per_cluster must be >= 1");
    const std::uint32_t n = static_cast<std::uint32_t>(assignment.labels.size());

    auto members = cluster_members(assignment);
    Rng rng(mix_seed(seed, 0x636363));  // "ccc"
    std::vector<std::vector<NodeId>> sampled(assignment.k);
    std::size_t max_drawn = 0;
    for (std::uint32_t c = 0; c < assignment.k; ++c) {
        rng.shuffle(members[c]);
        const std::size_t take = std::min<std::size_t>(samples_per_cluster, members[c].size());
        sampled[c].assign(members[c].begin(), members[c].begin() + take);
        max_drawn = std::max(max_drawn, take);
    }

    std::vector<Clique> cliques;
    for (std::size_t j = 0; j < max_drawn; ++j) {
        Clique clique;
        for (std::uint32_t c = 0; c < assignment.k; ++c)
            if (j < sampled[c].size()) clique.members.push_back(sampled[c][j]);
        cliques.push_back(std::move(clique));
    }
    if (cliques.size() < 2)
        throw std::runtime_error("ccc: cannot build a ring from fewer than two cliques");

    SelectionResult res;
    res.topology = ring_of_cliques(cliques);
    res.plan = finalize_plan(std::move(cliques), n, "hetero", {});
    return res;
}

SelectionResult homogeneous_baseline(const ClusterAssignment& assignment,
                                     const CliquePlan& hetero_plan, std::uint64_t seed) {
    if (hetero_plan.cliques.size() < 2)
        throw std::runtime_error("homogeneous baseline: reference plan has fewer than two cliques");
    const std::uint32_t n = static_cast<std::uint32_t>(assignment.labels.size());

    auto members = cluster_members(assignment);
    Rng rng(mix_seed(seed, 0x636363));  // same stream layout as ccc
    for (std::uint32_t c = 0; c < assignment.k; ++c) rng.shuffle(members[c]);

    // Fill cliques of the reference sizes from one cluster pool at a time.
    std::vector<Clique> cliques;
    std::vector<std::size_t> mixed;
    std::uint32_t cluster = 0;
    std::size_t offset = 0;
    for (std::size_t ci = 0; ci < hetero_plan.cliques.size(); ++ci) {
        const std::size_t size = hetero_plan.cliques[ci].members.size();
        Clique clique;
        bool straddled = false;
        while (clique.members.size() < size) {
            while (cluster < assignment.k && offset >= members[cluster].size()) {
                ++cluster;
                offset = 0;
            }
            if (cluster >= assignment.k)
                throw std::runtime_error("homogeneous baseline: node pool exhausted");
            if (!clique.members.empty() && offset == 0) straddled = true;
            clique.members.push_back(members[cluster][offset++]);
        }
        if (straddled) mixed.push_back(ci);
        cliques.push_back(std::move(clique));
    }

    SelectionResult res;
    res.topology = ring_of_cliques(cliques);
    res.plan = finalize_plan(std::move(cliques), n, "homo", std::move(mixed));
    return res;
}

double objective_score(const CliquePlan& plan, const Topology& t, const SimilarityMatrix& matrix) {
    double total = 0.0;
    for (NodeId v : plan.participants) {
        const auto& nbrs = t.neighbors(v);
        if (nbrs.empty()) continue;
        double own = 0.0;
        for (NodeId u : nbrs) own += matrix.at(v, u);
        total += own / static_cast<double>(nbrs.size());
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            for (std::size_t j = i + 1; j < nbrs.size(); ++j) total += matrix.at(nbrs[i], nbrs[j]);
    }
    return total;
}

}  // namespace topomorph
