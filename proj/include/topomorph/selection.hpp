#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "topomorph/graph.hpp"
#include "topomorph/sim_matrix.hpp"

namespace topomorph {

struct ClusterAssignment {
    std::uint32_t k = 0;
    std::vector<std::uint32_t> labels;    // one cluster index per node
    std::vector<double> centroids;        // k x n row-major
    std::vector<double> inertia_trace;    // per Lloyd iteration, for diagnostics
};

// Final-graph construction plan. mixed_cliques flags baseline cliques whose
// members were forced to span clusters by pool exhaustion.
struct CliquePlan {
    std::vector<Clique> cliques;
    std::vector<NodeId> participants;  // sorted union of clique members
    std::vector<NodeId> excluded;      // sorted complement
    std::string mode;                  // "hetero" | "homo"
    std::vector<std::size_t> mixed_cliques;

    nlohmann::json to_json(std::uint32_t k, const std::vector<std::uint32_t>& labels) const;
    static CliquePlan from_json(const nlohmann::json& j);
};

struct SelectionResult {
    CliquePlan plan;
    Topology topology;
};

// Lloyd's iterations over the matrix rows (row v is the vector of
// theta_{v,.} with a zero diagonal), k-means++ seeding from the given seed,
// stopping when the max centroid shift drops below 1e-6 or after 100
// iterations. Empty clusters are repaired by reassigning the point farthest
// from its centroid.
ClusterAssignment kmeans_rows(const SimilarityMatrix& matrix, std::uint32_t k, std::uint64_t seed);

// Cross-cluster cliquing: draws up to samples_per_cluster nodes uniformly
// without replacement from each cluster, forms cliques with one drawn node
// per cluster (smaller once a cluster is exhausted), and chains them into a
// ring. Throws when fewer than two cliques can be formed.
SelectionResult ccc_heterogeneous(const ClusterAssignment& assignment,
                                  std::uint32_t samples_per_cluster, std::uint64_t seed);

// Baseline with the identical clique-size sequence, but each clique drawn
// from a single cluster, exhausting clusters in ascending order. A clique
// straddling two pools is flagged in mixed_cliques.
SelectionResult homogeneous_baseline(const ClusterAssignment& assignment,
                                     const CliquePlan& hetero_plan, std::uint64_t seed);

// Peer-selection objective: sum over participants v of
//   (1/|N(v)|) * sum_{u in N(v)} theta_vu + sum_{u_i < u_j in N(v)} theta_{u_i u_j}.
// Higher means locally more heterogeneous. Throws on a missing matrix entry.
double objective_score(const CliquePlan& plan, const Topology& t, const SimilarityMatrix& matrix);

}  // namespace topomorph
