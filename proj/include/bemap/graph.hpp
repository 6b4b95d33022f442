#pragma once

#include <Eigen/Dense>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace bemap {

/// Immutable undirected graph in CSR form with node features, per-node
/// demographic group ids, and class labels (-1 = unlabeled).
struct Graph {
    int n = 0;
    int num_groups = 0;
    std::vector<int> offsets;    // size n+1
    std::vector<int> neighbors;  // sorted per row, no duplicates, no self loops
    Eigen::MatrixXd features;    // n x F
    std::vector<int> sensitive;  // values in [0, num_groups)
    std::vector<int> labels;     // 0/1 or -1 for unlabeled

    int degree(int i) const { return offsets[i + 1] - offsets[i]; }
    std::span<const int> neighbors_of(int i) const {
        return {neighbors.data() + offsets[i],
                static_cast<std::size_t>(degree(i))};
    }
    int num_features() const { return static_cast<int>(features.cols()); }

    /// Group with the larger population; ties go to group 0.
    int majority_group() const;

    void validate() const;  // throws std::invalid_argument on broken invariants
};

struct SplitMasks {
    std::vector<int> train, val, test;  // disjoint, sorted node indices
};

/// Builds a Graph from unordered (possibly duplicated, possibly one-directional)
/// edge pairs. Self loops are dropped, the adjacency is symmetrized.
Graph build_graph(int n, const std::vector<std::pair<int, int>>& edges,
                  Eigen::MatrixXd features, std::vector<int> sensitive,
                  std::vector<int> labels);

/// Loads an edge-list text file ("u v" per line, '#' comments) and a node CSV
/// with header "id,sensitive,label,f0,f1,...". Ids are remapped to 0..n-1 in
/// file order; features are standardized per column.
Graph load_graph(const std::string& edge_list_path,
                 const std::string& node_table_path);

/// Deterministic split of the labeled nodes; fractions must sum to 1.
SplitMasks make_splits(const Graph& g, double train_frac, double val_frac,
                       double test_frac, std::uint64_t seed);

struct SyntheticFeatureSpec {
    int dim = 8;
    double mean_separation = 1.0;  // group means at +-sep/2 on coordinate 0
    double stddev = 1.0;
};

/// Gilbert random graph: each unordered pair is an edge independently with
/// probability p. Groups drawn i.i.d. from group_fractions; features are
/// per-group spherical Gaussians. Nodes are unlabeled.
Graph generate_gilbert(int n, double p,
                       const std::vector<double>& group_fractions,
                       std::uint64_t seed,
                       const SyntheticFeatureSpec& feat = {});

struct BiasedSyntheticSpec {
    int n = 800;
    double p_in = 0.02;       // same-group edge probability
    double p_out = 0.002;     // cross-group edge probability
    double group1_frac = 0.4;
    double label_group_corr = 0.75;  // P(y = s)
    int feature_dim = 8;
    double label_signal = 1.6;   // label offset on coordinate 0
    double group_signal = 1.0;   // group offset on coordinate 1
    double noise = 1.0;
};

/// Homophilous two-block graph with group-correlated features and labels;
/// every node is labeled. Used by the experiment harness and tests.
Graph generate_biased_synthetic(const BiasedSyntheticSpec& spec,
                                std::uint64_t seed);

/// For each node, counts of distinct nodes at BFS distance 1..L, per group.
/// Returned flat as n * num_groups, row-major.
std::vector<int> khop_group_counts(const Graph& g, int hops);
std::vector<int> khop_group_counts_serial(const Graph& g, int hops);

/// Fraction of 1-hop neighbors in the dataset-wide majority group
/// (binary sensitive attribute); 0 for isolated nodes.
double majority_neighbor_ratio(const Graph& g, int node);

/// Histogram of majority_neighbor_ratio over the given nodes: 10 equal-width
/// bins [0,0.1),...,[0.9,1.0].
std::vector<int> neighbor_ratio_histogram(const Graph& g,
                                          std::span<const int> nodes);

}  // namespace bemap
