#include "bemap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "bemap/parallel.hpp"
#include "bemap/rng.hpp"

namespace bemap {

int Graph::majority_group() const {
    std::vector<int> pop(num_groups, 0);
    for (int s : sensitive) pop[s]++;
    int best = 0;
    for (int s = 1; s < num_groups; ++s)
        if (pop[s] > pop[best]) best = s;
    return best;
}

void Graph::validate() const {
    if (static_cast<int>(offsets.size()) != n + 1)
        throw std::invalid_argument("graph: offsets size mismatch");
    if (num_groups < 2) throw std::invalid_argument("graph: need >= 2 groups");
    for (int s : sensitive)
        if (s < 0 || s >= num_groups)
            throw std::invalid_argument("graph: sensitive value out of range");
    for (int i = 0; i < n; ++i) {
        auto nb = neighbors_of(i);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            int j = nb[k];
            if (j == i) throw std::invalid_argument("graph: self loop stored");
            if (k > 0 && nb[k] <= nb[k - 1])
                throw std::invalid_argument("graph: neighbor list not sorted/unique");
            auto back = neighbors_of(j);
            if (!std::binary_search(back.begin(), back.end(), i))
                throw std::invalid_argument("graph: adjacency not symmetric");
        }
    }
}

Graph build_graph(int n, const std::vector<std::pair<int, int>>& edges,
                  Eigen::MatrixXd features, std::vector<int> sensitive,
                  std::vector<int> labels) {
    std::vector<std::set<int>> adj(n);
    for (auto [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw std::invalid_argument("build_graph: edge endpoint out of range");
        if (u == v) continue;
        adj[u].insert(v);
        adj[v].insert(u);
    }
    Graph g;
    g.n = n;
    g.offsets.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) g.offsets[i + 1] = g.offsets[i] + static_cast<int>(adj[i].size());
    g.neighbors.reserve(g.offsets[n]);
    for (int i = 0; i < n; ++i)
        g.neighbors.insert(g.neighbors.end(), adj[i].begin(), adj[i].end());
    g.features = std::move(features);
    g.sensitive = std::move(sensitive);
    g.labels = std::move(labels);
    int max_s = 0;
    for (int s : g.sensitive) max_s = std::max(max_s, s);
    g.num_groups = std::max(2, max_s + 1);
    g.validate();
    return g;
}

namespace {

void standardize_columns(Eigen::MatrixXd& x) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        double mean = x.col(c).mean();
        x.col(c).array() -= mean;
        double var = x.col(c).squaredNorm() / static_cast<double>(x.rows());
        if (var > 1e-12) x.col(c) /= std::sqrt(var);
    }
}

}  // namespace

Graph load_graph(const std::string& edge_list_path,
                 const std::string& node_table_path) {
    std::ifstream nodes(node_table_path);
    if (!nodes) throw std::runtime_error("cannot open node table: " + node_table_path);

    std::string line;
    if (!std::getline(nodes, line))
        throw std::runtime_error("node table is empty: " + node_table_path);

    std::unordered_map<long long, int> id_map;
    std::vector<int> sensitive, labels;
    std::vector<std::vector<double>> feats;
    int line_no = 1;
    while (std::getline(nodes, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 3)
            throw std::runtime_error("node table line " + std::to_string(line_no) +
                                     ": expected at least id,sensitive,label");
        try {
            long long id = std::stoll(cells[0]);
            int s = std::stoi(cells[1]);
            int y = std::stoi(cells[2]);
            if (s < 0)
                throw std::runtime_error("node table line " + std::to_string(line_no) +
                                         ": negative sensitive value");
            if (y < -1 || y > 1)
                throw std::runtime_error("node table line " + std::to_string(line_no) +
                                         ": label must be 0, 1 or -1");
            if (!id_map.emplace(id, static_cast<int>(sensitive.size())).second)
                throw std::runtime_error("node table line " + std::to_string(line_no) +
                                         ": duplicate node id");
            sensitive.push_back(s);
            labels.push_back(y);
            std::vector<double> f;
            for (std::size_t k = 3; k < cells.size(); ++k) f.push_back(std::stod(cells[k]));
            feats.push_back(std::move(f));
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("node table line " + std::to_string(line_no) +
                                     ": malformed value");
        }
        if (feats.back().size() != feats.front().size())
            throw std::runtime_error("node table line " + std::to_string(line_no) +
                                     ": inconsistent feature count");
    }
    int n = static_cast<int>(sensitive.size());
    if (n == 0) throw std::runtime_error("node table has no rows");

    std::ifstream ef(edge_list_path);
    if (!ef) throw std::runtime_error("cannot open edge list: " + edge_list_path);
    std::vector<std::pair<int, int>> edges;
    line_no = 0;
    while (std::getline(ef, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::stringstream ss(line);
        long long u, v;
        if (!(ss >> u)) continue;  // blank / comment-only line
        if (!(ss >> v))
            throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                     ": expected two integers");
        auto iu = id_map.find(u), iv = id_map.find(v);
        if (iu == id_map.end() || iv == id_map.end())
            throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                     ": unknown node id");
        edges.emplace_back(iu->second, iv->second);
    }

    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(feats.front().size()));
    for (int i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c < x.cols(); ++c) x(i, c) = feats[i][c];
    standardize_columns(x);
    return build_graph(n, edges, std::move(x), std::move(sensitive), std::move(labels));
}

SplitMasks make_splits(const Graph& g, double train_frac, double val_frac,
                       double test_frac, std::uint64_t seed) {
    if (train_frac < 0 || val_frac < 0 || test_frac < 0 ||
        std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
        throw std::invalid_argument("make_splits: fractions must be nonnegative and sum to 1");
    std::vector<int> labeled;
    for (int i = 0; i < g.n; ++i)
        if (g.labels[i] >= 0) labeled.push_back(i);
    std::mt19937_64 rng(splitmix64(seed));
    std::shuffle(labeled.begin(), labeled.end(), rng);
    auto m = static_cast<std::size_t>(labeled.size());
    auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(m)));
    auto n_val = static_cast<std::size_t>(std::llround(val_frac * static_cast<double>(m)));
    n_train = std::min(n_train, m);
    n_val = std::min(n_val, m - n_train);
    SplitMasks masks;
    masks.train.assign(labeled.begin(), labeled.begin() + n_train);
    masks.val.assign(labeled.begin() + n_train, labeled.begin() + n_train + n_val);
    masks.test.assign(labeled.begin() + n_train + n_val, labeled.end());
    std::sort(masks.train.begin(), masks.train.end());
    std::sort(masks.val.begin(), masks.val.end());
    std::sort(masks.test.begin(), masks.test.end());
    return masks;
}

Graph generate_gilbert(int n, double p,
                       const std::vector<double>& group_fractions,
                       std::uint64_t seed, const SyntheticFeatureSpec& feat) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("generate_gilbert: p out of [0,1]");
    double sum = 0;
    for (double f : group_fractions) sum += f;
    if (group_fractions.size() < 2 || std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("generate_gilbert: group fractions must sum to 1");

    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (unif(rng) < p) edges.emplace_back(i, j);

    int num_groups = static_cast<int>(group_fractions.size());
    std::discrete_distribution<int> group_dist(group_fractions.begin(), group_fractions.end());
    std::vector<int> sensitive(n);
    for (int i = 0; i < n; ++i) sensitive[i] = group_dist(rng);

    std::normal_distribution<double> gauss(0.0, feat.stddev);
    Eigen::MatrixXd x(n, feat.dim);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < feat.dim; ++c) x(i, c) = gauss(rng);
        double sign = (sensitive[i] == 0) ? -1.0 : 1.0;
        x(i, 0) += sign * feat.mean_separation / 2.0;
    }
    std::vector<int> labels(n, -1);
    Graph g = build_graph(n, edges, std::move(x), std::move(sensitive), std::move(labels));
    g.num_groups = num_groups;
    return g;
}

Graph generate_biased_synthetic(const BiasedSyntheticSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(splitmix64(seed ^ 0x5151515151515151ULL));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = spec.n;
    std::vector<int> sensitive(n), labels(n);
    for (int i = 0; i < n; ++i) {
        sensitive[i] = unif(rng) < spec.group1_frac ? 1 : 0;
        labels[i] = unif(rng) < spec.label_group_corr ? sensitive[i] : 1 - sensitive[i];
    }
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double p = sensitive[i] == sensitive[j] ? spec.p_in : spec.p_out;
            if (unif(rng) < p) edges.emplace_back(i, j);
        }
    std::normal_distribution<double> gauss(0.0, spec.noise);
    Eigen::MatrixXd x(n, spec.feature_dim);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < spec.feature_dim; ++c) x(i, c) = gauss(rng);
        x(i, 0) += (labels[i] == 1 ? 1.0 : -1.0) * spec.label_signal / 2.0;
        x(i, 1) += (sensitive[i] == 1 ? 1.0 : -1.0) * spec.group_signal / 2.0;
    }
    return build_graph(n, edges, std::move(x), std::move(sensitive), std::move(labels));
}

namespace {

void khop_counts_for_node(const Graph& g, int hops, int src, int* out) {
    // small BFS; visited reallocated per node so nodes are independent
    std::vector<int> dist(g.n, -1);
    std::queue<int> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (dist[u] == hops) continue;
        for (int v : g.neighbors_of(u)) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                out[g.sensitive[v]]++;
                q.push(v);
            }
        }
    }
}

}  // namespace

std::vector<int> khop_group_counts(const Graph& g, int hops) {
    if (hops < 1) throw std::invalid_argument("khop_group_counts: hops must be >= 1");
    std::vector<int> counts(static_cast<std::size_t>(g.n) * g.num_groups, 0);
    parallel::for_each_index(g.n, [&](int i) {
        khop_counts_for_node(g, hops, i, counts.data() + static_cast<std::size_t>(i) * g.num_groups);
    });
    return counts;
}

std::vector<int> khop_group_counts_serial(const Graph& g, int hops) {
    if (hops < 1) throw std::invalid_argument("khop_group_counts: hops must be >= 1");
    std::vector<int> counts(static_cast<std::size_t>(g.n) * g.num_groups, 0);
    parallel::for_each_index_serial(g.n, [&](int i) {
        khop_counts_for_node(g, hops, i, counts.data() + static_cast<std::size_t>(i) * g.num_groups);
    });
    return counts;
}

double majority_neighbor_ratio(const Graph& g, int node) {
    int deg = g.degree(node);
    if (deg == 0) return 0.0;
    int maj = g.majority_group();
    int count = 0;
    for (int j : g.neighbors_of(node))
        if (g.sensitive[j] == maj) count++;
    return static_cast<double>(count) / static_cast<double>(deg);
}

std::vector<int> neighbor_ratio_histogram(const Graph& g, std::span<const int> nodes) {
    std::vector<int> bins(10, 0);
    for (int i : nodes) {
        double r = majority_neighbor_ratio(g, i);
        int b = std::min(9, static_cast<int>(r * 10.0));
        bins[b]++;
    }
    return bins;
}

}  // namespace bemap
