#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topomorph/graph.hpp"

namespace topomorph {

// One gossiped similarity entry; x < y canonically.
struct SimilarityTuple {
    NodeId x;
    NodeId y;
    double theta;
};

// Pairwise divergence table over unordered node pairs with per-row fill
// tracking. Presence is a flat bitset over canonical pair indices; values
// are kept only in value mode (counting runs track presence alone).
class SimilarityMatrix {
public:
    enum class Mode { values, counting };

    explicit SimilarityMatrix(std::uint32_t n, Mode mode = Mode::values);

    std::uint32_t node_count() const { return n_; }
    Mode mode() const { return mode_; }

    static std::uint64_t pair_index(std::uint32_t n, NodeId a, NodeId b);

    bool contains(NodeId a, NodeId b) const;
    void insert(NodeId a, NodeId b, double theta);
    void insert(const SimilarityTuple& t) { insert(t.x, t.y, t.theta); }

    // Throws on an absent entry.
    double at(NodeId a, NodeId b) const;

    std::uint64_t fill() const { return known_count_; }
    std::uint64_t total_pairs() const { return total_pairs_; }
    std::uint32_t row_fill(NodeId v) const;
    bool complete() const { return known_count_ == total_pairs_; }

    std::vector<NodeId> missing_in_row(NodeId v) const;

    double mean_known() const;

    // n x n row-major feature rows with zero diagonal; absent entries take
    // the global mean of known entries when imputation is requested, and
    // throw otherwise.
    std::vector<double> dense_rows(bool impute_missing) const;

    // Binary dump: "BFTM" magic, u32 version, u64 n, then n(n-1)/2 doubles
    // in canonical pair order with NaN marking absent entries.
    void dump(const std::string& path) const;
    static SimilarityMatrix load(const std::string& path);

private:
    void check_ids(NodeId a, NodeId b) const;

    std::uint32_t n_ = 0;
    Mode mode_ = Mode::values;
    std::uint64_t total_pairs_ = 0;
    std::uint64_t known_count_ = 0;
    std::vector<std::uint64_t> known_;
    std::vector<double> values_;
    std::vector<std::uint32_t> row_fill_;
};

}  // namespace topomorph
