#include "bemap/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bemap/parallel.hpp"
#include "bemap/rng.hpp"

namespace bemap {

SamplerMode sampler_mode_from_string(const std::string& s) {
    if (s == "none") return SamplerMode::None;
    if (s == "uniform") return SamplerMode::Uniform;
    if (s == "degree") return SamplerMode::Degree;
    if (s == "bemap") return SamplerMode::Bemap;
    throw std::invalid_argument("unknown sampler mode: " + s);
}

std::string to_string(SamplerMode m) {
    switch (m) {
        case SamplerMode::None: return "none";
        case SamplerMode::Uniform: return "uniform";
        case SamplerMode::Degree: return "degree";
        case SamplerMode::Bemap: return "bemap";
    }
    return "?";
}

NormMode norm_mode_from_string(const std::string& s) {
    if (s == "row") return NormMode::Row;
    if (s == "symmetric" || s == "sym") return NormMode::Symmetric;
    throw std::invalid_argument("unknown norm mode: " + s);
}

std::string to_string(NormMode m) {
    return m == NormMode::Row ? "row" : "symmetric";
}

BalanceTable compute_balance_table(const Graph& g, int hops, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("compute_balance_table: delta must be > 0");
    if (hops < 1) throw std::invalid_argument("compute_balance_table: hops must be >= 1");
    std::vector<int> counts = khop_group_counts(g, hops);
    const int S = g.num_groups;

    BalanceTable bt;
    bt.hops = hops;
    bt.delta = delta;
    bt.balance.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        const int* c = counts.data() + static_cast<std::size_t>(i) * S;
        double spread;
        if (S == 2) {
            spread = std::abs(c[0] - c[1]);
        } else {
            // average squared difference over unordered group pairs
            double acc = 0.0;
            for (int a = 0; a < S; ++a)
                for (int b = a + 1; b < S; ++b) {
                    double d = c[a] - c[b];
                    acc += d * d;
                }
            spread = std::sqrt(acc * 2.0 / (static_cast<double>(S) * (S - 1)));
        }
        bt.balance[i] = 1.0 / (spread + delta);
    }

    bt.prob.resize(g.neighbors.size());
    for (int i = 0; i < g.n; ++i) {
        double total = 0.0;
        for (int e = g.offsets[i]; e < g.offsets[i + 1]; ++e)
            total += bt.balance[g.neighbors[e]];
        for (int e = g.offsets[i]; e < g.offsets[i + 1]; ++e)
            bt.prob[e] = bt.balance[g.neighbors[e]] / total;
    }
    return bt;
}

std::vector<int> weighted_sample_without_replacement(std::span<const double> weights,
                                                     int k, std::mt19937_64& rng) {
    const int m = static_cast<int>(weights.size());
    if (k >= m) {
        std::vector<int> all(m);
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    std::vector<int> pool(m);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<double> w(weights.begin(), weights.end());
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<int> picked;
    picked.reserve(k);
    int live = m;
    for (int draw = 0; draw < k; ++draw) {
        double u = unif(rng) * total;
        int chosen = live - 1;
        double acc = 0.0;
        for (int t = 0; t < live; ++t) {
            acc += w[t];
            if (u < acc) {
                chosen = t;
                break;
            }
        }
        picked.push_back(pool[chosen]);
        total -= w[chosen];
        std::swap(w[chosen], w[live - 1]);
        std::swap(pool[chosen], pool[live - 1]);
        --live;
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

namespace {

// Neighbor weights for a node under the given sampler mode, aligned with
// the node's neighbor list.
std::vector<double> neighbor_weights(const Graph& g, int node,
                                     const BalanceTable& bt, SamplerMode mode) {
    const int deg = g.degree(node);
    std::vector<double> w(deg);
    for (int t = 0; t < deg; ++t) {
        int j = g.neighbors[g.offsets[node] + t];
        switch (mode) {
            case SamplerMode::Uniform: w[t] = 1.0; break;
            case SamplerMode::Degree: w[t] = std::pow(static_cast<double>(g.degree(j)), 0.75); break;
            default: w[t] = bt.prob[g.offsets[node] + t]; break;
        }
    }
    return w;
}

std::vector<int> sample_node(const Graph& g, int node,
                             std::span<const double> weights, double beta,
                             std::mt19937_64& rng) {
    const int deg = g.degree(node);
    if (deg == 0) return {};
    auto nb = g.neighbors_of(node);
    const int S = g.num_groups;

    std::vector<int> count(S, 0);
    count[g.sensitive[node]]++;  // self-augmented neighborhood
    for (int j : nb) count[g.sensitive[j]]++;
    int nonzero = 0;
    for (int c : count) nonzero += (c > 0);

    if (nonzero == 1) {
        // single-group self-augmented neighborhood
        int k = std::min(deg, std::max(4, static_cast<int>(std::ceil(beta * deg))));
        auto idx = weighted_sample_without_replacement(weights, k, rng);
        std::vector<int> out;
        out.reserve(idx.size());
        for (int t : idx) out.push_back(nb[t]);
        return out;
    }

    // mixed groups: downsample every nonempty group to the smallest nonzero
    // count; the self node always stays and counts toward its group
    int target = g.n + 1;
    for (int c : count)
        if (c > 0) target = std::min(target, c);

    std::vector<int> out;
    for (int s = 0; s < S; ++s) {
        if (count[s] == 0) continue;
        int quota = target - (g.sensitive[node] == s ? 1 : 0);
        if (quota <= 0) continue;
        std::vector<int> members;
        std::vector<double> mw;
        for (int t = 0; t < deg; ++t)
            if (g.sensitive[nb[t]] == s) {
                members.push_back(nb[t]);
                mw.push_back(weights[t]);
            }
        if (quota >= static_cast<int>(members.size())) {
            out.insert(out.end(), members.begin(), members.end());
        } else {
            for (int t : weighted_sample_without_replacement(mw, quota, rng))
                out.push_back(members[t]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

EpochGraph finalize(const Graph& g, std::vector<std::vector<int>> retained,
                    NormMode norm_mode) {
    EpochGraph eg;
    eg.n = g.n;
    eg.norm_mode = norm_mode;
    eg.offsets.assign(g.n + 1, 0);
    for (int i = 0; i < g.n; ++i)
        eg.offsets[i + 1] = eg.offsets[i] + static_cast<int>(retained[i].size());
    eg.neighbors.reserve(eg.offsets[g.n]);
    for (int i = 0; i < g.n; ++i)
        eg.neighbors.insert(eg.neighbors.end(), retained[i].begin(), retained[i].end());

    eg.weights.resize(eg.neighbors.size());
    eg.self_weight.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        double fs_i = eg.fair_size(i);
        eg.self_weight[i] = 1.0 / fs_i;
        for (int e = eg.offsets[i]; e < eg.offsets[i + 1]; ++e) {
            int j = eg.neighbors[e];
            eg.weights[e] = norm_mode == NormMode::Row
                                ? 1.0 / fs_i
                                : 1.0 / (std::sqrt(fs_i) * std::sqrt(static_cast<double>(eg.fair_size(j))));
        }
    }

    eg.t_offsets.assign(g.n + 1, 0);
    for (int j : eg.neighbors) eg.t_offsets[j + 1]++;
    for (int i = 0; i < g.n; ++i) eg.t_offsets[i + 1] += eg.t_offsets[i];
    eg.t_neighbors.resize(eg.neighbors.size());
    eg.t_weights.resize(eg.neighbors.size());
    std::vector<int> cursor(eg.t_offsets.begin(), eg.t_offsets.end() - 1);
    for (int i = 0; i < g.n; ++i)
        for (int e = eg.offsets[i]; e < eg.offsets[i + 1]; ++e) {
            int j = eg.neighbors[e];
            eg.t_neighbors[cursor[j]] = i;
            eg.t_weights[cursor[j]] = eg.weights[e];
            cursor[j]++;
        }
    return eg;
}

template <typename Loop>
EpochGraph sample_epoch_impl(const Graph& g, const BalanceTable& bt,
                             SamplerMode mode, double beta, NormMode norm_mode,
                             std::uint64_t seed, std::uint64_t epoch, Loop loop) {
    std::vector<std::vector<int>> retained(g.n);
    if (mode == SamplerMode::None) {
        for (int i = 0; i < g.n; ++i) {
            auto nb = g.neighbors_of(i);
            retained[i].assign(nb.begin(), nb.end());
        }
    } else {
        if (beta <= 0.0 || beta > 1.0)
            throw std::invalid_argument("sample_epoch_graph: beta must be in (0,1]");
        loop(g.n, [&](int i) {
            auto rng = derive_stream(seed, epoch, static_cast<std::uint64_t>(i));
            auto w = neighbor_weights(g, i, bt, mode);
            retained[i] = sample_node(g, i, w, beta, rng);
        });
    }
    return finalize(g, std::move(retained), norm_mode);
}

}  // namespace

std::vector<int> sample_fair_neighborhood(const Graph& g, int node,
                                          const BalanceTable& bt, double beta,
                                          std::mt19937_64& rng) {
    if (beta <= 0.0 || beta > 1.0)
        throw std::invalid_argument("sample_fair_neighborhood: beta must be in (0,1]");
    auto w = neighbor_weights(g, node, bt, SamplerMode::Bemap);
    return sample_node(g, node, w, beta, rng);
}

EpochGraph sample_epoch_graph(const Graph& g, const BalanceTable& bt,
                              SamplerMode mode, double beta, NormMode norm_mode,
                              std::uint64_t seed, std::uint64_t epoch) {
    return sample_epoch_impl(g, bt, mode, beta, norm_mode, seed, epoch,
                             [](int n, auto&& fn) { parallel::for_each_index(n, fn); });
}

EpochGraph sample_epoch_graph_serial(const Graph& g, const BalanceTable& bt,
                                     SamplerMode mode, double beta,
                                     NormMode norm_mode, std::uint64_t seed,
                                     std::uint64_t epoch) {
    return sample_epoch_impl(g, bt, mode, beta, norm_mode, seed, epoch,
                             [](int n, auto&& fn) { parallel::for_each_index_serial(n, fn); });
}

EpochGraph full_epoch_graph(const Graph& g, NormMode norm_mode) {
    BalanceTable dummy;
    return sample_epoch_graph_serial(g, dummy, SamplerMode::None, 1.0, norm_mode, 0, 0);
}

}  // namespace bemap
