#include "topomorph/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

#include "topomorph/rng.hpp"

namespace topomorph {

Topology::Topology(std::uint32_t n, std::vector<std::pair<NodeId, NodeId>> edges) : n_(n) {
    edges_.reserve(edges.size());
    for (auto [a, b] : edges) {
        if (a == b) throw std::invalid_argument("topology: self-loop on node " + std::to_string(a));
        if (a >= n || b >= n)
            throw std::invalid_argument("topology: edge endpoint out of range");
        if (a > b) std::swap(a, b);
        edges_.emplace_back(a, b);
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw std::invalid_argument("topology: duplicate edge");
    adjacency_.resize(n_);
    for (auto [a, b] : edges_) {
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

const std::vector<NodeId>& Topology::neighbors(NodeId v) const {
    if (v >= n_) throw std::invalid_argument("topology: node " + std::to_string(v) + " out of range");
    return adjacency_[v];
}

bool Topology::has_edge(NodeId a, NodeId b) const {
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(a, b));
}

bool Topology::connected_over(const std::vector<NodeId>& nodes) const {
    if (nodes.empty()) return true;
    std::vector<bool> wanted(n_, false);
    for (NodeId v : nodes) {
        if (v >= n_) throw std::invalid_argument("topology: node out of range");
        wanted[v] = true;
    }
    std::vector<bool> seen(n_, false);
    std::deque<NodeId> frontier{nodes.front()};
    seen[nodes.front()] = true;
    std::size_t reached = 0;
    while (!frontier.empty()) {
        NodeId v = frontier.front();
        frontier.pop_front();
        if (wanted[v]) ++reached;
        for (NodeId u : adjacency_[v]) {
            if (!seen[u]) {
                seen[u] = true;
                frontier.push_back(u);
            }
        }
    }
    return reached == nodes.size();
}

nlohmann::json Topology::to_json(const std::vector<Clique>* cliques) const {
    nlohmann::json j;
    j["n"] = n_;
    auto edges = nlohmann::json::array();
    for (auto [a, b] : edges_) edges.push_back({a, b});
    j["edges"] = std::move(edges);
    auto cl = nlohmann::json::array();
    if (cliques) {
        for (const auto& c : *cliques) cl.push_back(c.members);
    }
    j["cliques"] = std::move(cl);
    return j;
}

Topology Topology::from_json(const nlohmann::json& j, std::vector<Clique>* cliques_out) {
    std::uint32_t n = j.at("n").get<std::uint32_t>();
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& e : j.at("edges")) {
        edges.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
    }
    if (cliques_out) {
        cliques_out->clear();
        for (const auto& c : j.at("cliques")) {
            cliques_out->push_back(Clique{c.get<std::vector<NodeId>>()});
        }
    }
    return Topology(n, std::move(edges));
}

Topology random_regular_like(std::uint32_t n, std::uint32_t m, std::uint64_t seed) {
    if (m < 1 || m >= n)
        throw std::invalid_argument("random graph: degree must satisfy 1 <= m < n");
    Rng rng(mix_seed(seed, 0x67726170));  // "grap"

    std::vector<std::uint32_t> degree(n, 0);
    std::vector<std::vector<NodeId>> adj(n);
    std::vector<std::pair<NodeId, NodeId>> edges;
    auto adjacent = [&](NodeId a, NodeId b) {
        const auto& l = adj[a].size() <= adj[b].size() ? adj[a] : adj[b];
        NodeId t = adj[a].size() <= adj[b].size() ? b : a;
        return std::find(l.begin(), l.end(), t) != l.end();
    };
    auto link = [&](NodeId a, NodeId b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
        ++degree[a];
        ++degree[b];
        edges.emplace_back(std::min(a, b), std::max(a, b));
    };

    for (NodeId v = 0; v < n; ++v) {
        while (degree[v] < m) {
            // Rejection sampling first; fall back to an explicit candidate
            // scan once eligible nodes get scarce.
            NodeId pick = n;
            for (int attempt = 0; attempt < 64; ++attempt) {
                NodeId u = static_cast<NodeId>(rng.below(n));
                if (u != v && degree[u] < m && !adjacent(v, u)) {
                    pick = u;
                    break;
                }
            }
            if (pick == n) {
                std::vector<NodeId> eligible;
                for (NodeId u = 0; u < n; ++u)
                    if (u != v && degree[u] < m && !adjacent(v, u)) eligible.push_back(u);
                if (eligible.empty()) break;
                pick = eligible[rng.below(eligible.size())];
            }
            link(v, pick);
        }
    }

    // Swap repair: an isolated node steals an endpoint from the smallest
    // canonical edge not incident to it. Keeps every degree within [1, m]
    // whenever a feasible graph exists.
    std::sort(edges.begin(), edges.end());
    for (NodeId v = 0; v < n; ++v) {
        if (degree[v] != 0) continue;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            auto [a, b] = edges[i];
            if (a == v || b == v) continue;
            edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(i));
            --degree[a];
            --degree[b];
            edges.emplace_back(std::min(v, a), std::max(v, a));
            ++degree[v];
            ++degree[a];
            std::sort(edges.begin(), edges.end());
            break;
        }
    }
    return Topology(n, std::move(edges));
}

Topology ring_of_cliques(const std::vector<Clique>& cliques) {
    if (cliques.size() < 2) throw std::invalid_argument("ring of cliques: need at least 2 cliques");
    std::set<NodeId> seen;
    NodeId max_id = 0;
    for (const auto& c : cliques) {
        if (c.members.empty()) throw std::invalid_argument("ring of cliques: empty clique");
        for (NodeId v : c.members) {
            if (!seen.insert(v).second)
                throw std::invalid_argument("ring of cliques: cliques overlap on node " +
                                            std::to_string(v));
            max_id = std::max(max_id, v);
        }
    }

    std::set<std::pair<NodeId, NodeId>> edges;
    auto add = [&](NodeId a, NodeId b) {
        if (a == b) return;
        edges.insert({std::min(a, b), std::max(a, b)});
    };
    for (const auto& c : cliques) {
        for (std::size_t i = 0; i < c.members.size(); ++i)
            for (std::size_t j = i + 1; j < c.members.size(); ++j)
                add(c.members[i], c.members[j]);
    }
    const std::size_t k = cliques.size();
    for (std::size_t j = 0; j < k; ++j) {
        const auto& from = cliques[j].members;
        const auto& to = cliques[(j + 1) % k].members;
        add(from[j % from.size()], to[(j + 1) % to.size()]);
    }
    return Topology(max_id + 1,
                    std::vector<std::pair<NodeId, NodeId>>(edges.begin(), edges.end()));
}

std::vector<Topology> split_partitions(const Topology& t, const std::vector<Clique>& cliques,
                                       std::uint32_t p) {
    if (p < 2 || p > cliques.size())
        throw std::invalid_argument("split: partition count must satisfy 2 <= p <= clique count");

    const std::size_t k = cliques.size();
    const std::size_t base = k / p;
    const std::size_t extra = k % p;

    std::vector<Topology> parts;
    std::size_t next = 0;
    for (std::uint32_t chain = 0; chain < p; ++chain) {
        const std::size_t len = base + (chain < extra ? 1 : 0);
        std::vector<bool> member(t.node_count(), false);
        for (std::size_t j = next; j < next + len; ++j)
            for (NodeId v : cliques[j].members) member[v] = true;
        next += len;

        std::vector<std::pair<NodeId, NodeId>> edges;
        for (auto [a, b] : t.edges())
            if (member[a] && member[b]) edges.emplace_back(a, b);
        parts.emplace_back(t.node_count(), std::move(edges));
    }
    return parts;
}

Topology merge_topologies(std::uint32_t n, const std::vector<Topology>& parts) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& t : parts)
        edges.insert(edges.end(), t.edges().begin(), t.edges().end());
    return Topology(n, std::move(edges));
}

}  // namespace topomorph
