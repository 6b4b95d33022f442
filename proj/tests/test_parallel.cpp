#include <doctest.h>

#include "bemap/graph.hpp"
#include "bemap/model.hpp"
#include "bemap/parallel.hpp"
#include "bemap/sampling.hpp"

using namespace bemap;

// The OpenMP kernels must be bit-identical to their serial references.
TEST_CASE("khop counts: parallel equals serial") {
    Graph g = generate_gilbert(300, 0.03, {0.6, 0.4}, 77);
    for (int hops : {1, 2, 3})
        CHECK(khop_group_counts(g, hops) == khop_group_counts_serial(g, hops));
}

TEST_CASE("epoch sampling: parallel equals serial for every mode") {
    Graph g = generate_biased_synthetic({.n = 400}, 31);
    BalanceTable bt = compute_balance_table(g, 2, 1.0);
    for (auto mode : {SamplerMode::Uniform, SamplerMode::Degree, SamplerMode::Bemap}) {
        for (std::uint64_t epoch : {0ULL, 1ULL, 17ULL}) {
            auto a = sample_epoch_graph(g, bt, mode, 0.25, NormMode::Row, 5, epoch);
            auto b = sample_epoch_graph_serial(g, bt, mode, 0.25, NormMode::Row, 5, epoch);
            CHECK(a.offsets == b.offsets);
            CHECK(a.neighbors == b.neighbors);
            CHECK(a.weights == b.weights);
            CHECK(a.t_neighbors == b.t_neighbors);
        }
    }
}

TEST_CASE("aggregation kernels: parallel equals serial bit for bit") {
    Graph g = generate_gilbert(500, 0.02, {0.5, 0.5}, 13);
    auto eg = full_epoch_graph(g, NormMode::Symmetric);
    Eigen::MatrixXd x = g.features;
    CHECK((aggregate(eg, x) - aggregate_serial(eg, x)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((aggregate_transpose(eg, x) - aggregate_transpose_serial(eg, x))
              .cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("thread count does not change sampled epoch graphs") {
    Graph g = generate_biased_synthetic({.n = 200}, 3);
    BalanceTable bt = compute_balance_table(g, 2, 1.0);
    int saved = parallel::max_threads();
    auto multi = sample_epoch_graph(g, bt, SamplerMode::Bemap, 0.25, NormMode::Row, 9, 0);
    parallel::set_num_threads(1);
    auto single = sample_epoch_graph(g, bt, SamplerMode::Bemap, 0.25, NormMode::Row, 9, 0);
    parallel::set_num_threads(saved);
    CHECK(multi.neighbors == single.neighbors);
    CHECK(multi.weights == single.weights);
}
