#pragma once

#include <random>
#include <span>
#include <vector>

#include "bemap/graph.hpp"

namespace bemap {

enum class SamplerMode { None, Uniform, Degree, Bemap };
enum class NormMode { Row, Symmetric };

SamplerMode sampler_mode_from_string(const std::string& s);
std::string to_string(SamplerMode m);
NormMode norm_mode_from_string(const std::string& s);
std::string to_string(NormMode m);

/// Per-node balance scores and per-directed-edge sampling probabilities,
/// aligned with Graph::neighbors.
struct BalanceTable {
    std::vector<double> balance;  // size n, > 0
    std::vector<double> prob;     // size |neighbors|, rows sum to 1
    int hops = 2;
    double delta = 1.0;
};

/// Per-epoch sampled neighborhood with precomputed aggregation weights.
/// The self node is always implicitly retained; its weight is stored apart.
struct EpochGraph {
    int n = 0;
    NormMode norm_mode = NormMode::Row;
    std::vector<int> offsets;       // n+1
    std::vector<int> neighbors;     // retained neighbors, self excluded
    std::vector<double> weights;    // alpha_ij per retained neighbor
    std::vector<double> self_weight;  // alpha_ii
    // transpose (incoming edges) for the backward pass
    std::vector<int> t_offsets;
    std::vector<int> t_neighbors;
    std::vector<double> t_weights;

    std::span<const int> retained(int i) const {
        return {neighbors.data() + offsets[i],
                static_cast<std::size_t>(offsets[i + 1] - offsets[i])};
    }
    int fair_size(int i) const { return offsets[i + 1] - offsets[i] + 1; }
};

BalanceTable compute_balance_table(const Graph& g, int hops, double delta);

/// Draws k items without replacement by successive draws with renormalization.
/// Returns indices into `weights`.
std::vector<int> weighted_sample_without_replacement(std::span<const double> weights,
                                                     int k, std::mt19937_64& rng);

/// The fair-neighborhood rule for a single node: balanced downsampling for
/// mixed-group neighborhoods, k = min(|N|, max{4, ceil(beta |N|)}) when the
/// self-augmented neighborhood is single-group. Returns retained neighbor ids.
std::vector<int> sample_fair_neighborhood(const Graph& g, int node,
                                          const BalanceTable& bt, double beta,
                                          std::mt19937_64& rng);

/// One epoch's neighborhoods for every node. Modes uniform/degree apply the
/// same size rules with uniform or d^0.75-proportional weights; none keeps
/// the full neighborhoods.
EpochGraph sample_epoch_graph(const Graph& g, const BalanceTable& bt,
                              SamplerMode mode, double beta, NormMode norm_mode,
                              std::uint64_t seed, std::uint64_t epoch);
EpochGraph sample_epoch_graph_serial(const Graph& g, const BalanceTable& bt,
                                     SamplerMode mode, double beta,
                                     NormMode norm_mode, std::uint64_t seed,
                                     std::uint64_t epoch);

/// Full-neighborhood EpochGraph (vanilla message passing).
EpochGraph full_epoch_graph(const Graph& g, NormMode norm_mode);

}  // namespace bemap
