#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "topomorph/graph.hpp"
#include "topomorph/proxy.hpp"
#include "topomorph/sim_matrix.hpp"

namespace topomorph {

// Per-round communication accounting.
struct RoundStats {
    std::uint32_t round = 0;
    std::uint64_t proxy_downloads = 0;
    std::uint64_t proxy_bytes = 0;
    std::uint64_t broadcast_tuples = 0;
    std::uint64_t broadcast_bytes = 0;
    std::uint64_t matrix_fill = 0;
};

struct MorphConfig {
    std::uint32_t degree = 0;      // 0 selects ceil(log2 n)
    std::uint32_t max_rounds = 1000;
    std::uint64_t tuple_bytes = 24;
    std::uint64_t proxy_bytes = 0;  // 0 derives 16 + 8*G*C from the proxies
    std::uint64_t seed = 0;
};

std::uint32_t default_degree(std::uint32_t n);

// Idealized round estimate ceil(sqrt(n) / log2(n)), used for bound checks
// and progress reporting.
std::uint32_t expected_rounds(std::uint64_t n);

struct BftmRound {
    Topology morph;                        // G_{i+1}
    std::vector<SimilarityTuple> tuples;   // this round's broadcast
    RoundStats stats;
};

// One synchronous gossip protocol driver. Each round every unfinished node,
// swept in breadth-first queue order, links up to M un-encountered peers,
// exchanges proxies over the new edges, pairs each downloaded proxy against
// its cache, and broadcasts the newly created similarity tuples. Broadcasts
// are lossless and synchronous, so a single matrix is every node's view.
// Pass no proxies for counting mode: presence and traffic are tracked while
// similarity values are stubbed to zero.
class MorphEngine {
public:
    MorphEngine(std::uint32_t n, const std::vector<Proxy>* proxies, const MorphConfig& cfg);

    bool complete() const { return matrix_.complete(); }
    std::uint32_t rounds_done() const { return rounds_done_; }
    std::uint32_t degree() const { return degree_; }

    // Runs one morphing round; throws std::logic_error when already complete.
    BftmRound step();

    const SimilarityMatrix& matrix() const { return matrix_; }
    SimilarityMatrix take_matrix() { return std::move(matrix_); }

    // Per-round snapshots of every row's fill count (the encounter series).
    const std::vector<std::vector<std::uint32_t>>& fill_history() const { return fill_history_; }

    const std::vector<NodeId>& cache_of(NodeId v) const;
    std::vector<NodeId> missing_of(NodeId v) const { return matrix_.missing_in_row(v); }

private:
    double pair_value(NodeId a, NodeId b) const;
    void sample_picks(NodeId v, std::uint32_t quota, const std::vector<std::uint16_t>& round_degree,
                      std::vector<NodeId>& out);

    std::uint32_t n_;
    const std::vector<Proxy>* proxies_;  // null in counting mode
    MorphConfig cfg_;
    std::uint32_t degree_;
    std::uint64_t proxy_wire_;
    SimilarityMatrix matrix_;
    std::vector<std::vector<NodeId>> cache_;
    std::vector<std::vector<std::uint32_t>> fill_history_;
    std::uint32_t rounds_done_ = 0;
};

struct MorphResult {
    SimilarityMatrix matrix;
    std::vector<RoundStats> rounds;
    std::vector<std::vector<std::uint32_t>> fill_history;
    bool completed = false;
};

// Runs rounds until the matrix is complete or cfg.max_rounds is reached;
// a partial matrix is returned as-is under early stopping.
MorphResult run_morphing(const std::vector<Proxy>& proxies, const MorphConfig& cfg);

struct AccountingResult {
    std::uint32_t rounds = 0;
    RoundStats totals;
    std::vector<RoundStats> per_round;
    std::vector<std::vector<std::uint32_t>> fill_history;
};

// Full protocol with zero-cost payload placeholders: only message counts and
// byte totals are tracked. Byte totals are counts times the given sizes.
AccountingResult accounting_run(std::uint32_t n, std::uint32_t m, std::uint64_t proxy_bytes,
                                std::uint64_t tuple_bytes, std::uint64_t seed,
                                std::uint32_t max_rounds = 1000);

// Cumulative encounters of one node: entry i is the number of distinct peers
// whose pairwise similarity with v exists by the end of round i.
std::vector<std::uint32_t> encounter_counts(
    const std::vector<std::vector<std::uint32_t>>& fill_history, NodeId v);

}  // namespace topomorph
