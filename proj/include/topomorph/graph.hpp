#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace topomorph {

using NodeId = std::uint32_t;

// Ordered member list of one clique in the final graph.
struct Clique {
    std::vector<NodeId> members;
};

// Immutable undirected graph over node ids [0, n). Edges are stored in
// canonical (a < b) order, sorted lexicographically; adjacency lists are
// built once at construction and sorted ascending.
class Topology {
public:
    Topology() = default;
    Topology(std::uint32_t n, std::vector<std::pair<NodeId, NodeId>> edges);

    std::uint32_t node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }

    const std::vector<NodeId>& neighbors(NodeId v) const;
    bool has_edge(NodeId a, NodeId b) const;

    // True when every node in `nodes` is reachable from the first one.
    bool connected_over(const std::vector<NodeId>& nodes) const;

    nlohmann::json to_json(const std::vector<Clique>* cliques = nullptr) const;
    static Topology from_json(const nlohmann::json& j, std::vector<Clique>* cliques_out = nullptr);

private:
    std::uint32_t n_ = 0;
    std::vector<std::pair<NodeId, NodeId>> edges_;
    std::vector<std::vector<NodeId>> adjacency_;
};

// Sparse random graph with max degree m. Each node in ascending order
// samples neighbors uniformly from the nodes still below the degree cap,
// skipping duplicates; nodes left isolated are repaired by an edge swap.
// Exact regularity is not attempted.
Topology random_regular_like(std::uint32_t n, std::uint32_t m, std::uint64_t seed);

// Completes every clique internally and chains them into a ring: clique j's
// member at position (j mod size_j) bridges to clique (j+1)'s member at
// position ((j+1) mod size_{j+1}). A two-singleton ring collapses to one edge.
Topology ring_of_cliques(const std::vector<Clique>& cliques);

// Cuts a ring of cliques into p chains of consecutive cliques whose clique
// counts differ by at most one. Each returned topology is the subgraph of t
// induced on its chain's members, over the same global id space.
std::vector<Topology> split_partitions(const Topology& t, const std::vector<Clique>& cliques,
                                       std::uint32_t p);

// Union of edge sets over the same id space (used to train on partitioned graphs).
Topology merge_topologies(std::uint32_t n, const std::vector<Topology>& parts);

}  // namespace topomorph
