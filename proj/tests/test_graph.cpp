#include <doctest.h>

#include <algorithm>
#include <set>

#include "topomorph/graph.hpp"
#include "topomorph/rng.hpp"

using namespace topomorph;

namespace {

// Degree-count oracle over a produced edge set.
std::vector<std::uint32_t> degrees(const Topology& t) {
    std::vector<std::uint32_t> deg(t.node_count(), 0);
    for (auto [a, b] : t.edges()) {
        ++deg[a];
        ++deg[b];
    }
    return deg;
}

// Intra-clique + bridge count formula: K*C(s,2) summed + K bridges.
std::size_t ring_edge_formula(const std::vector<std::size_t>& sizes) {
    std::size_t edges = 0;
    for (std::size_t s : sizes) edges += s * (s - 1) / 2;
    return edges + sizes.size();
}

std::vector<Clique> sequential_cliques(const std::vector<std::size_t>& sizes) {
    std::vector<Clique> cliques;
    NodeId next = 0;
    for (std::size_t s : sizes) {
        Clique c;
        for (std::size_t i = 0; i < s; ++i) c.members.push_back(next++);
        cliques.push_back(c);
    }
    return cliques;
}

}  // namespace

TEST_CASE("topology constructor rejects malformed edges") {
    CHECK_THROWS_AS(Topology(3, {{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(Topology(3, {{0, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(Topology(3, {{0, 1}, {1, 0}}), std::invalid_argument);
}

TEST_CASE("neighbors adjacency") {
    Topology single(2, {{0, 1}});
    CHECK(single.neighbors(0) == std::vector<NodeId>{1});
    Topology empty(1, {});
    CHECK(empty.neighbors(0).empty());
    CHECK_THROWS_AS(empty.neighbors(1), std::invalid_argument);
}

TEST_CASE("edge symmetry holds on random graphs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Topology t = random_regular_like(50, 5, seed);
        for (NodeId v = 0; v < t.node_count(); ++v)
            for (NodeId u : t.neighbors(v)) {
                const auto& back = t.neighbors(u);
                CHECK(std::find(back.begin(), back.end(), v) != back.end());
            }
    }
}

TEST_CASE("random_regular_like: n=2 m=1 gives the single possible edge") {
    const Topology t = random_regular_like(2, 1, 0);
    REQUIRE(t.edge_count() == 1);
    CHECK(t.has_edge(0, 1));
}

TEST_CASE("random_regular_like: degree bounds via the degree oracle") {
    const Topology t = random_regular_like(8, 3, 42);
    CHECK(t.node_count() == 8);
    for (auto d : degrees(t)) {
        CHECK(d >= 1);
        CHECK(d <= 3);
    }

    const Topology big = random_regular_like(1024, 10, 7);
    CHECK(big.edge_count() <= 1024 * 10 / 2);
    for (auto d : degrees(big)) {
        CHECK(d >= 1);
        CHECK(d <= 10);
    }
}

TEST_CASE("random_regular_like: deterministic and seed-sensitive") {
    const Topology a = random_regular_like(64, 6, 9);
    const Topology b = random_regular_like(64, 6, 9);
    const Topology c = random_regular_like(64, 6, 10);
    CHECK(a.edges() == b.edges());
    CHECK(a.edges() != c.edges());
}

TEST_CASE("random_regular_like: degree bound property over many seeds") {
    Rng rng(123);
    for (int rep = 0; rep < 60; ++rep) {
        const std::uint32_t n = 4 + static_cast<std::uint32_t>(rng.below(60));
        const std::uint32_t m = 2 + static_cast<std::uint32_t>(rng.below(std::min(n - 2, 8u)));
        const Topology t = random_regular_like(n, m, rng.next_u64());
        for (auto d : degrees(t)) {
            CHECK(d >= 1);
            CHECK(d <= m);
        }
    }
}

TEST_CASE("random_regular_like rejects invalid degree") {
    CHECK_THROWS_AS(random_regular_like(4, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(random_regular_like(4, 0, 0), std::invalid_argument);
}

TEST_CASE("ring_of_cliques: two singletons collapse to one edge") {
    const Topology t = ring_of_cliques(sequential_cliques({1, 1}));
    CHECK(t.edge_count() == 1);
    CHECK(t.has_edge(0, 1));
}

TEST_CASE("ring_of_cliques: edge counts match the formula oracle") {
    SUBCASE("4 cliques of 3") {
        const auto cliques = sequential_cliques({3, 3, 3, 3});
        const Topology t = ring_of_cliques(cliques);
        CHECK(t.edge_count() == ring_edge_formula({3, 3, 3, 3}));
        CHECK(t.edge_count() == 16);
    }
    SUBCASE("uneven sizes 3,3,2") {
        const auto cliques = sequential_cliques({3, 3, 2});
        const Topology t = ring_of_cliques(cliques);
        CHECK(t.edge_count() == ring_edge_formula({3, 3, 2}));
        CHECK(t.edge_count() == 10);
    }
}

TEST_CASE("ring_of_cliques output is connected and cliques are complete") {
    const auto cliques = sequential_cliques({4, 3, 5, 2});
    const Topology t = ring_of_cliques(cliques);
    std::vector<NodeId> members;
    for (const auto& c : cliques) {
        members.insert(members.end(), c.members.begin(), c.members.end());
        for (std::size_t i = 0; i < c.members.size(); ++i)
            for (std::size_t j = i + 1; j < c.members.size(); ++j)
                CHECK(t.has_edge(c.members[i], c.members[j]));
    }
    CHECK(t.connected_over(members));
}

TEST_CASE("ring_of_cliques: bridge node sees clique peers plus one bridge peer") {
    const auto cliques = sequential_cliques({3, 3, 3, 3});
    const Topology t = ring_of_cliques(cliques);
    // Clique 0 bridges from members[0 % 3] = node 0 to clique 1's members[1 % 3] = node 4.
    const auto& nbrs = t.neighbors(0);
    std::set<NodeId> got(nbrs.begin(), nbrs.end());
    CHECK(got.count(1) == 1);
    CHECK(got.count(2) == 1);
    CHECK(got.count(4) == 1);
}

TEST_CASE("ring_of_cliques rejects overlap and empties") {
    CHECK_THROWS_AS(ring_of_cliques({Clique{{0, 1}}, Clique{{1, 2}}}), std::invalid_argument);
    CHECK_THROWS_AS(ring_of_cliques({Clique{{0}}, Clique{{}}}), std::invalid_argument);
    CHECK_THROWS_AS(ring_of_cliques({Clique{{0, 1, 2}}}), std::invalid_argument);
}

TEST_CASE("split_partitions: balanced chains, disjoint nodes, exact bridge removal") {
    SUBCASE("ring of 4, p=2") {
        const auto cliques = sequential_cliques({3, 3, 3, 3});
        const Topology t = ring_of_cliques(cliques);
        const auto parts = split_partitions(t, cliques, 2);
        REQUIRE(parts.size() == 2);
        CHECK(t.edge_count() - (parts[0].edge_count() + parts[1].edge_count()) == 2);
    }
    SUBCASE("ring of 4, p=4 isolates every clique") {
        const auto cliques = sequential_cliques({2, 2, 2, 2});
        const Topology t = ring_of_cliques(cliques);
        const auto parts = split_partitions(t, cliques, 4);
        REQUIRE(parts.size() == 4);
        for (const auto& p : parts) CHECK(p.edge_count() == 1);  // just the clique edge
    }
    SUBCASE("ring of 7, p=3 splits 3/2/2") {
        const auto cliques = sequential_cliques({2, 2, 2, 2, 2, 2, 2});
        const Topology t = ring_of_cliques(cliques);
        const auto parts = split_partitions(t, cliques, 3);
        REQUIRE(parts.size() == 3);
        // Chain of c cliques holds c intra edges (size 2) + c-1 internal bridges.
        CHECK(parts[0].edge_count() == 3 + 2);
        CHECK(parts[1].edge_count() == 2 + 1);
        CHECK(parts[2].edge_count() == 2 + 1);
    }
}

TEST_CASE("split_partitions: edge union plus removed bridges equals input") {
    const auto cliques = sequential_cliques({3, 4, 2, 3, 3});
    const Topology t = ring_of_cliques(cliques);
    for (std::uint32_t p = 2; p <= 5; ++p) {
        const auto parts = split_partitions(t, cliques, p);
        std::set<std::pair<NodeId, NodeId>> covered;
        std::set<NodeId> seen_nodes;
        for (const auto& part : parts) {
            std::set<NodeId> nodes;
            for (auto [a, b] : part.edges()) {
                covered.insert({a, b});
                nodes.insert(a);
                nodes.insert(b);
            }
            for (NodeId v : nodes) {
                CHECK(seen_nodes.count(v) == 0);  // pairwise node-disjoint
                seen_nodes.insert(v);
            }
            CHECK(part.connected_over({nodes.begin(), nodes.end()}));
        }
        CHECK(t.edge_count() - covered.size() == p);
        for (auto e : covered) CHECK(t.has_edge(e.first, e.second));
    }
}

TEST_CASE("split_partitions rejects p out of range") {
    const auto cliques = sequential_cliques({2, 2, 2});
    const Topology t = ring_of_cliques(cliques);
    CHECK_THROWS_AS(split_partitions(t, cliques, 4), std::invalid_argument);
    CHECK_THROWS_AS(split_partitions(t, cliques, 1), std::invalid_argument);
}

TEST_CASE("topology json round-trip is byte-stable") {
    const auto cliques = sequential_cliques({3, 2, 4});
    const Topology t = ring_of_cliques(cliques);
    const auto j = t.to_json(&cliques);
    std::vector<Clique> back_cliques;
    const Topology back = Topology::from_json(j, &back_cliques);
    CHECK(back.edges() == t.edges());
    CHECK(back.node_count() == t.node_count());
    CHECK(back_cliques.size() == cliques.size());
    CHECK(j.dump() == back.to_json(&back_cliques).dump());
}
