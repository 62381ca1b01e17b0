#include "topomorph/sim_matrix.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace topomorph {

SimilarityMatrix::SimilarityMatrix(std::uint32_t n, Mode mode)
    : n_(n),
      mode_(mode),
      total_pairs_(static_cast<std::uint64_t>(n) * (n - 1) / 2),
      row_fill_(n, 0) {
    if (n == 0) throw std::invalid_argument("similarity matrix: node count must be positive");
    known_.assign((total_pairs_ + 63) / 64, 0);
    if (mode_ == Mode::values) values_.assign(total_pairs_, 0.0);
}

std::uint64_t SimilarityMatrix::pair_index(std::uint32_t n, NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    const std::uint64_t an = a;
    return an * (2ull * n - an - 1) / 2 + (b - a - 1);
}

void SimilarityMatrix::check_ids(NodeId a, NodeId b) const {
    if (a >= n_ || b >= n_) throw std::invalid_argument("similarity matrix: node out of range");
    if (a == b) throw std::invalid_argument("similarity matrix: diagonal entry");
}

bool SimilarityMatrix::contains(NodeId a, NodeId b) const {
    check_ids(a, b);
    const std::uint64_t i = pair_index(n_, a, b);
    return (known_[i >> 6] >> (i & 63)) & 1;
}

void SimilarityMatrix::insert(NodeId a, NodeId b, double theta) {
    check_ids(a, b);
    const std::uint64_t i = pair_index(n_, a, b);
    std::uint64_t& word = known_[i >> 6];
    const std::uint64_t bit = 1ull << (i & 63);
    if (word & bit) throw std::logic_error("similarity matrix: pair already present");
    word |= bit;
    if (mode_ == Mode::values) values_[i] = theta;
    ++known_count_;
    ++row_fill_[a];
    ++row_fill_[b];
}

double SimilarityMatrix::at(NodeId a, NodeId b) const {
    if (!contains(a, b)) throw std::runtime_error("similarity matrix: entry missing");
    if (mode_ != Mode::values)
        throw std::logic_error("similarity matrix: counting mode holds no values");
    return values_[pair_index(n_, a, b)];
}

std::uint32_t SimilarityMatrix::row_fill(NodeId v) const {
    if (v >= n_) throw std::invalid_argument("similarity matrix: node out of range");
    return row_fill_[v];
}

std::vector<NodeId> SimilarityMatrix::missing_in_row(NodeId v) const {
    if (v >= n_) throw std::invalid_argument("similarity matrix: node out of range");
    std::vector<NodeId> out;
    out.reserve(n_ - 1 - row_fill_[v]);
    for (NodeId u = 0; u < n_; ++u)
        if (u != v && !contains(v, u)) out.push_back(u);
    return out;
}

double SimilarityMatrix::mean_known() const {
    if (mode_ != Mode::values)
        throw std::logic_error("similarity matrix: counting mode holds no values");
    if (known_count_ == 0) return 0.0;
    double sum = 0.0;
    for (std::uint64_t i = 0; i < total_pairs_; ++i)
        if ((known_[i >> 6] >> (i & 63)) & 1) sum += values_[i];
    return sum / static_cast<double>(known_count_);
}

std::vector<double> SimilarityMatrix::dense_rows(bool impute_missing) const {
    if (mode_ != Mode::values)
        throw std::logic_error("similarity matrix: counting mode holds no values");
    if (!complete() && !impute_missing)
        throw std::runtime_error("similarity matrix: incomplete and imputation not requested");
    const double fill_value = complete() ? 0.0 : mean_known();
    std::vector<double> rows(static_cast<std::size_t>(n_) * n_, 0.0);
    for (NodeId a = 0; a < n_; ++a) {
        for (NodeId b = a + 1; b < n_; ++b) {
            const std::uint64_t i = pair_index(n_, a, b);
            const bool known = (known_[i >> 6] >> (i & 63)) & 1;
            const double v = known ? values_[i] : fill_value;
            rows[static_cast<std::size_t>(a) * n_ + b] = v;
            rows[static_cast<std::size_t>(b) * n_ + a] = v;
        }
    }
    return rows;
}

namespace {
constexpr char kMagic[4] = {'B', 'F', 'T', 'M'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void SimilarityMatrix::dump(const std::string& path) const {
    if (mode_ != Mode::values)
        throw std::logic_error("similarity matrix: counting mode holds no values");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("similarity matrix: cannot open " + path);
    f.write(kMagic, 4);
    f.write(reinterpret_cast<const char*>(&kVersion), 4);
    const std::uint64_t n = n_;
    f.write(reinterpret_cast<const char*>(&n), 8);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::uint64_t i = 0; i < total_pairs_; ++i) {
        const bool known = (known_[i >> 6] >> (i & 63)) & 1;
        const double v = known ? values_[i] : nan;
        f.write(reinterpret_cast<const char*>(&v), 8);
    }
    if (!f) throw std::runtime_error("similarity matrix: write failed for " + path);
}

SimilarityMatrix SimilarityMatrix::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("similarity matrix: cannot open " + path);
    char magic[4];
    std::uint32_t version = 0;
    std::uint64_t n = 0;
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&n), 8);
    if (!f || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("similarity matrix: bad header in " + path);
    if (version != kVersion)
        throw std::runtime_error("similarity matrix: unsupported version in " + path);
    SimilarityMatrix m(static_cast<std::uint32_t>(n));
    for (NodeId a = 0; a < m.n_; ++a) {
        for (NodeId b = a + 1; b < m.n_; ++b) {
            double v = 0.0;
            f.read(reinterpret_cast<char*>(&v), 8);
            if (!f) throw std::runtime_error("similarity matrix: truncated file " + path);
            if (!std::isnan(v)) m.insert(a, b, v);
        }
    }
    return m;
}

}  // namespace topomorph
