#include "topomorph/bftm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "topomorph/rng.hpp"

namespace topomorph {

std::uint32_t default_degree(std::uint32_t n) {
    if (n < 2) return 1;
    std::uint32_t bits = 0;
    std::uint32_t v = n - 1;
    while (v) {
        ++bits;
        v >>= 1;
    }
    return bits;  // ceil(log2 n) for n >= 2
}

std::uint32_t expected_rounds(std::uint64_t n) {
    if (n < 2) throw std::invalid_argument("expected_rounds: n must be >= 2");
    const long double r = std::sqrt(static_cast<long double>(n)) / std::log2(static_cast<long double>(n));
    return static_cast<std::uint32_t>(std::ceil(r));
}

MorphEngine::MorphEngine(std::uint32_t n, const std::vector<Proxy>* proxies, const MorphConfig& cfg)
    : n_(n),
      proxies_(proxies),
      cfg_(cfg),
      degree_(cfg.degree ? cfg.degree : default_degree(n)),
      matrix_(n == 0 ? 1 : n,
              proxies ? SimilarityMatrix::Mode::values : SimilarityMatrix::Mode::counting),
      cache_(n) {
    if (n_ == 0) throw std::invalid_argument("bftm: node count must be positive");
    if (proxies_ && proxies_->size() != n_)
        throw std::invalid_argument("bftm: one proxy per node required");
    if (cfg_.proxy_bytes) {
        proxy_wire_ = cfg_.proxy_bytes;
    } else if (proxies_ && !proxies_->empty()) {
        proxy_wire_ = proxy_wire_bytes((*proxies_)[0].samples, (*proxies_)[0].classes);
    } else {
        proxy_wire_ = 0;
    }
}

const std::vector<NodeId>& MorphEngine::cache_of(NodeId v) const {
    if (v >= n_) throw std::invalid_argument("bftm: node out of range");
    return cache_[v];
}

double MorphEngine::pair_value(NodeId a, NodeId b) const {
    if (!proxies_) return 0.0;  // counting mode: value irrelevant
    if (a > b) std::swap(a, b);
    return pair_similarity((*proxies_)[a], (*proxies_)[b]);
}

void MorphEngine::sample_picks(NodeId v, std::uint32_t quota,
                               const std::vector<std::uint16_t>& round_degree,
                               std::vector<NodeId>& out) {
    out.clear();
    const std::uint32_t missing = n_ - 1 - matrix_.row_fill(v);
    if (missing == 0 || quota == 0) return;
    Rng rng(mix_seed(cfg_.seed, (static_cast<std::uint64_t>(rounds_done_) << 32) | v, 0x7069636bULL));

    auto eligible = [&](NodeId u) {
        return u != v && round_degree[u] < degree_ && !matrix_.contains(v, u) &&
               std::find(out.begin(), out.end(), u) == out.end();
    };

    if (missing > 2ull * degree_) {
        // Plenty of un-encountered peers: rejection sampling.
        std::uint32_t attempts = 32 * quota;
        while (out.size() < quota && attempts-- > 0) {
            NodeId u = static_cast<NodeId>(rng.below(n_));
            if (eligible(u)) out.push_back(u);
        }
        if (out.size() == quota) return;
    }
    // Scarce tail (or exhausted attempt budget): enumerate, shuffle, and walk,
    // skipping candidates already at the round-degree cap.
    std::vector<NodeId> candidates = matrix_.missing_in_row(v);
    rng.shuffle(candidates);
    for (NodeId u : candidates) {
        if (out.size() >= quota) break;
        if (eligible(u)) out.push_back(u);
    }
}

BftmRound MorphEngine::step() {
    if (complete()) throw std::logic_error("bftm: similarity matrix already complete");

    const std::uint32_t round = ++rounds_done_;
    BftmRound result;
    result.stats.round = round;

    std::vector<NodeId> pool;
    pool.reserve(n_);
    for (NodeId v = 0; v < n_; ++v)
        if (matrix_.row_fill(v) < n_ - 1) pool.push_back(v);

    std::vector<std::uint16_t> round_degree(n_, 0);
    std::vector<bool> processed(n_, false);
    std::deque<NodeId> queue;
    std::size_t pool_pos = 0;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<NodeId> picks;

    auto emit = [&](NodeId a, NodeId b) {
        const double theta = pair_value(a, b);
        matrix_.insert(a, b, theta);
        result.tuples.push_back({std::min(a, b), std::max(a, b), theta});
    };

    for (;;) {
        if (queue.empty()) {
            // Continue the breadth-first sweep from the next unvisited
            // unfinished node once the current component is exhausted.
            while (pool_pos < pool.size() && processed[pool[pool_pos]]) ++pool_pos;
            if (pool_pos == pool.size()) break;
            queue.push_back(pool[pool_pos]);
        }
        const NodeId v = queue.front();
        queue.pop_front();
        if (processed[v]) continue;
        processed[v] = true;

        const std::uint32_t fill = matrix_.row_fill(v);
        if (fill == n_ - 1) continue;  // completed earlier in this round
        if (round_degree[v] >= degree_) continue;
        const std::uint32_t quota =
            std::min<std::uint32_t>(degree_ - round_degree[v], n_ - 1 - fill);

        sample_picks(v, quota, round_degree, picks);
        for (NodeId x : picks) {
            edges.emplace_back(std::min(v, x), std::max(v, x));
            ++round_degree[v];
            ++round_degree[x];
            result.stats.proxy_downloads += 2;  // mutual exchange over the new edge
            result.stats.proxy_bytes += 2 * proxy_wire_;

            // Direct pair; may have just been covered through an intermediate
            // while this node processed an earlier pick.
            if (!matrix_.contains(v, x)) emit(v, x);
            // Each endpoint pairs the proxy it just downloaded against its
            // own cache; only pairs absent from the matrix are computed.
            for (NodeId p : cache_[v])
                if (p != x && !matrix_.contains(x, p)) emit(x, p);
            for (NodeId p : cache_[x])
                if (p != v && !matrix_.contains(v, p)) emit(v, p);

            cache_[v].push_back(x);
            cache_[x].push_back(v);
            queue.push_back(x);
        }
    }

    result.stats.broadcast_tuples = result.tuples.size();
    result.stats.broadcast_bytes = result.tuples.size() * cfg_.tuple_bytes;
    result.stats.matrix_fill = matrix_.fill();
    result.morph = Topology(n_, std::move(edges));

    std::vector<std::uint32_t> fills(n_);
    for (NodeId v = 0; v < n_; ++v) fills[v] = matrix_.row_fill(v);
    fill_history_.push_back(std::move(fills));
    return result;
}

MorphResult run_morphing(const std::vector<Proxy>& proxies, const MorphConfig& cfg) {
    if (proxies.empty()) throw std::invalid_argument("run_morphing: need at least one node");
    if (cfg.max_rounds < 1) throw std::invalid_argument("run_morphing: max_rounds must be >= 1");
    MorphEngine engine(static_cast<std::uint32_t>(proxies.size()), &proxies, cfg);
    MorphResult res{SimilarityMatrix(1), {}, {}, false};
    while (!engine.complete() && engine.rounds_done() < cfg.max_rounds) {
        BftmRound r = engine.step();
        res.rounds.push_back(r.stats);
    }
    res.completed = engine.complete();
    res.fill_history = engine.fill_history();
    res.matrix = engine.take_matrix();
    return res;
}

AccountingResult accounting_run(std::uint32_t n, std::uint32_t m, std::uint64_t proxy_bytes,
                                std::uint64_t tuple_bytes, std::uint64_t seed,
                                std::uint32_t max_rounds) {
    if (n < 2) throw std::invalid_argument("accounting_run: n must be >= 2");
    MorphConfig cfg;
    cfg.degree = m;
    cfg.max_rounds = max_rounds;
    cfg.tuple_bytes = tuple_bytes;
    cfg.proxy_bytes = proxy_bytes;
    cfg.seed = seed;
    MorphEngine engine(n, nullptr, cfg);

    AccountingResult res;
    while (!engine.complete() && engine.rounds_done() < max_rounds) {
        BftmRound r = engine.step();
        res.totals.proxy_downloads += r.stats.proxy_downloads;
        res.totals.proxy_bytes += r.stats.proxy_bytes;
        res.totals.broadcast_tuples += r.stats.broadcast_tuples;
        res.totals.broadcast_bytes += r.stats.broadcast_bytes;
        res.per_round.push_back(r.stats);
    }
    res.rounds = engine.rounds_done();
    res.totals.round = res.rounds;
    res.totals.matrix_fill = engine.matrix().fill();
    res.fill_history = engine.fill_history();
    return res;
}

std::vector<std::uint32_t> encounter_counts(
    const std::vector<std::vector<std::uint32_t>>& fill_history, NodeId v) {
    if (fill_history.empty()) throw std::invalid_argument("encounter_counts: empty history");
    if (v >= fill_history.front().size())
        throw std::invalid_argument("encounter_counts: node out of range");
    std::vector<std::uint32_t> out;
    out.reserve(fill_history.size());
    for (const auto& round : fill_history) out.push_back(round[v]);
    return out;
}

}  // namespace topomorph
