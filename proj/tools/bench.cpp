// Compares the OpenMP kernels against their serial reference implementations
// and reports timings plus a checksum agreement bit.
#include <chrono>
#include <cstdio>

#include "bemap/graph.hpp"
#include "bemap/model.hpp"
#include "bemap/parallel.hpp"
#include "bemap/sampling.hpp"

using clk = std::chrono::steady_clock;

namespace {

template <typename Fn>
double time_ms(Fn&& fn, int reps) {
    auto t0 = clk::now();
    for (int r = 0; r < reps; ++r) fn();
    auto t1 = clk::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    const int n = 4000;
    bemap::Graph g = bemap::generate_gilbert(n, 0.005, {0.6, 0.4}, 42);
    bemap::BalanceTable bt = bemap::compute_balance_table(g, 2, 1.0);
    Eigen::MatrixXd x = g.features;

    std::printf("threads: %d, nodes: %d, edges: %d\n", bemap::parallel::max_threads(),
                g.n, g.offsets[g.n] / 2);

    double khop_s = time_ms([&] { bemap::khop_group_counts_serial(g, 2); }, 3);
    double khop_p = time_ms([&] { bemap::khop_group_counts(g, 2); }, 3);
    bool khop_ok = bemap::khop_group_counts(g, 2) == bemap::khop_group_counts_serial(g, 2);
    std::printf("khop_group_counts    serial %8.2f ms  parallel %8.2f ms  speedup %5.2fx  match %d\n",
                khop_s, khop_p, khop_s / khop_p, khop_ok);

    double samp_s = time_ms(
        [&] { bemap::sample_epoch_graph_serial(g, bt, bemap::SamplerMode::Bemap, 0.25,
                                               bemap::NormMode::Row, 1, 0); },
        5);
    double samp_p = time_ms(
        [&] { bemap::sample_epoch_graph(g, bt, bemap::SamplerMode::Bemap, 0.25,
                                        bemap::NormMode::Row, 1, 0); },
        5);
    auto eg_p = bemap::sample_epoch_graph(g, bt, bemap::SamplerMode::Bemap, 0.25,
                                          bemap::NormMode::Row, 1, 0);
    auto eg_s = bemap::sample_epoch_graph_serial(g, bt, bemap::SamplerMode::Bemap, 0.25,
                                                 bemap::NormMode::Row, 1, 0);
    bool samp_ok = eg_p.neighbors == eg_s.neighbors && eg_p.weights == eg_s.weights;
    std::printf("sample_epoch_graph   serial %8.2f ms  parallel %8.2f ms  speedup %5.2fx  match %d\n",
                samp_s, samp_p, samp_s / samp_p, samp_ok);

    auto full = bemap::full_epoch_graph(g, bemap::NormMode::Row);
    double agg_s = time_ms([&] { bemap::aggregate_serial(full, x); }, 10);
    double agg_p = time_ms([&] { bemap::aggregate(full, x); }, 10);
    bool agg_ok = (bemap::aggregate(full, x) - bemap::aggregate_serial(full, x))
                      .cwiseAbs().maxCoeff() == 0.0;
    std::printf("aggregate            serial %8.2f ms  parallel %8.2f ms  speedup %5.2fx  match %d\n",
                agg_s, agg_p, agg_s / agg_p, agg_ok);

    double aggt_s = time_ms([&] { bemap::aggregate_transpose_serial(full, x); }, 10);
    double aggt_p = time_ms([&] { bemap::aggregate_transpose(full, x); }, 10);
    bool aggt_ok = (bemap::aggregate_transpose(full, x) -
                    bemap::aggregate_transpose_serial(full, x))
                       .cwiseAbs().maxCoeff() == 0.0;
    std::printf("aggregate_transpose  serial %8.2f ms  parallel %8.2f ms  speedup %5.2fx  match %d\n",
                aggt_s, aggt_p, aggt_s / aggt_p, aggt_ok);

    return (khop_ok && samp_ok && agg_ok && aggt_ok) ? 0 : 1;
}
