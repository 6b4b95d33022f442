#include <doctest.h>

#include <cmath>
#include <random>

#include "bemap/graph.hpp"
#include "bemap/metrics.hpp"

using namespace bemap;

namespace {

double delta_sp_oracle(const std::vector<int>& pred, const std::vector<int>& s,
                       const std::vector<int>& mask) {
    double num[2] = {0, 0}, pos[2] = {0, 0};
    for (int i : mask) {
        num[s[i]] += 1;
        if (pred[i] == 1) pos[s[i]] += 1;
    }
    return std::abs(pos[1] / num[1] - pos[0] / num[0]);
}

double delta_eo_oracle(const std::vector<int>& pred, const std::vector<int>& y,
                       const std::vector<int>& s, const std::vector<int>& mask) {
    double num[2] = {0, 0}, tp[2] = {0, 0};
    for (int i : mask)
        if (y[i] == 1) {
            num[s[i]] += 1;
            if (pred[i] == 1) tp[s[i]] += 1;
        }
    return std::abs(tp[1] / num[1] - tp[0] / num[0]);
}

double auc_oracle(const std::vector<double>& scores, const std::vector<int>& y,
                  const std::vector<int>& mask) {
    double wins = 0, pairs = 0;
    for (int i : mask)
        for (int j : mask) {
            if (y[i] != 1 || y[j] != 0) continue;
            pairs += 1;
            if (scores[i] > scores[j])
                wins += 1;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    return wins / pairs;
}

double distance_bias_oracle(const Eigen::MatrixXd& e, const std::vector<int>& s,
                            const std::vector<int>& mask) {
    int ng = 0;
    for (int i : mask) ng = std::max(ng, s[i] + 1);
    double total = 0;
    for (int i : mask) {
        Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(e.cols());
        double cnt = 0;
        for (int j : mask)
            if (s[j] == s[i]) {
                mu += e.row(j);
                cnt += 1;
            }
        mu /= cnt;
        total += (e.row(i) - mu).squaredNorm();
    }
    return 1.0 / (total / static_cast<double>(mask.size()));
}

}  // namespace

TEST_CASE("delta_sp basics") {
    // group 1 acceptance 0.6 (3/5), group 0 acceptance 0.4 (2/5)
    std::vector<int> s = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    std::vector<int> pred = {1, 1, 0, 0, 0, 1, 1, 1, 0, 0};
    std::vector<int> mask = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK(delta_sp(pred, s, mask) == doctest::Approx(0.2));
    std::vector<int> same(10, 1);
    CHECK(delta_sp(same, s, mask) == 0.0);
    std::vector<int> mask0 = {0, 1};
    CHECK_THROWS_AS(delta_sp(pred, s, mask0), std::domain_error);
}

TEST_CASE("delta_eo basics") {
    std::vector<int> s = {0, 0, 0, 1, 1, 1};
    std::vector<int> y = {1, 1, 0, 1, 1, 0};
    std::vector<int> pred_perfect = y;
    std::vector<int> mask = {0, 1, 2, 3, 4, 5};
    CHECK(delta_eo(pred_perfect, y, s, mask) == 0.0);
    std::vector<int> pred = {1, 0, 1, 1, 1, 0};  // TPR 0.5 vs 1.0
    CHECK(delta_eo(pred, y, s, mask) == doctest::Approx(0.5));
    std::vector<int> no_pos_mask = {2, 5};
    CHECK_THROWS_AS(delta_eo(pred, y, s, no_pos_mask), std::domain_error);
}

TEST_CASE("group-label swap invariance of delta_sp and delta_eo") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int t = 0; t < 20; ++t) {
        int n = 50;
        std::vector<int> s(n), y(n), pred(n), mask(n);
        for (int i = 0; i < n; ++i) {
            s[i] = bit(rng);
            y[i] = bit(rng);
            pred[i] = bit(rng);
            mask[i] = i;
        }
        std::vector<int> flipped(n);
        for (int i = 0; i < n; ++i) flipped[i] = 1 - s[i];
        bool ok_groups = false;
        try {
            CHECK(delta_sp(pred, s, mask) ==
                  doctest::Approx(delta_sp(pred, flipped, mask)).epsilon(1e-15));
            CHECK(delta_eo(pred, y, s, mask) ==
                  doctest::Approx(delta_eo(pred, y, flipped, mask)).epsilon(1e-15));
            ok_groups = true;
        } catch (const std::domain_error&) {
        }
        (void)ok_groups;
    }
}

TEST_CASE("counting metrics match brute-force oracles on random instances") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> bit(0, 1);
    std::uniform_real_distribution<double> unif(0, 1);
    for (int t = 0; t < 100; ++t) {
        int n = 200;
        std::vector<int> s(n), y(n), pred(n), mask;
        std::vector<double> scores(n);
        for (int i = 0; i < n; ++i) {
            s[i] = bit(rng);
            y[i] = bit(rng);
            pred[i] = bit(rng);
            scores[i] = unif(rng);
            mask.push_back(i);
        }
        CHECK(std::abs(delta_sp(pred, s, mask) - delta_sp_oracle(pred, s, mask)) <= 1e-15);
        CHECK(std::abs(delta_eo(pred, y, s, mask) - delta_eo_oracle(pred, y, s, mask)) <= 1e-15);
        CHECK(std::abs(auc(scores, y, mask) - auc_oracle(scores, y, mask)) <= 1e-12);
    }
}

TEST_CASE("auc edge cases and rank invariance") {
    std::vector<int> y = {0, 0, 1, 1};
    std::vector<int> mask = {0, 1, 2, 3};
    std::vector<double> perfect = {0, 0, 1, 1};
    CHECK(auc(perfect, y, mask) == doctest::Approx(1.0));
    std::vector<double> ties(4, 0.5);
    CHECK(auc(ties, y, mask) == doctest::Approx(0.5));
    CHECK_THROWS_AS(auc(perfect, std::vector<int>{1, 1, 1, 1}, mask), std::domain_error);

    // invariance under strictly increasing transforms
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-2, 2);
    std::vector<double> scores(100);
    std::vector<int> y2(100), mask2(100);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int i = 0; i < 100; ++i) {
        scores[i] = unif(rng);
        y2[i] = bit(rng);
        mask2[i] = i;
    }
    std::vector<double> transformed(100);
    for (int i = 0; i < 100; ++i) transformed[i] = std::exp(3 * scores[i]) + 7;
    CHECK(auc(scores, y2, mask2) == doctest::Approx(auc(transformed, y2, mask2)).epsilon(1e-15));
}

TEST_CASE("auc pairwise oracle at n=500") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unif(0, 1);
    std::uniform_int_distribution<int> bit(0, 1);
    std::vector<double> scores(500);
    std::vector<int> y(500), mask(500);
    for (int i = 0; i < 500; ++i) {
        scores[i] = std::round(unif(rng) * 20) / 20.0;  // force ties
        y[i] = bit(rng);
        mask[i] = i;
    }
    CHECK(std::abs(auc(scores, y, mask) - auc_oracle(scores, y, mask)) <= 1e-12);
}

TEST_CASE("distance_based_bias direct formula") {
    // all vectors at their centroid except one at squared distance 2
    int n = 8;
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, 2);
    std::vector<int> s(n, 0);
    for (int i = n / 2; i < n; ++i) {
        s[i] = 1;
        e.row(i) << 10.0, 0.0;
    }
    // the metric evaluates against *empirical* centroids, so perturb a
    // symmetric pair of group-0 vectors to leave the centroid in place
    e.row(0) << std::sqrt(0.5), std::sqrt(0.5);
    e.row(1) << -std::sqrt(0.5), -std::sqrt(0.5);
    std::vector<int> mask(n);
    for (int i = 0; i < n; ++i) mask[i] = i;
    // mean squared distance = (1 + 1)/8 -> bias = 4
    CHECK(distance_based_bias(e, s, mask) == doctest::Approx(4.0));
}

TEST_CASE("distance_based_bias homogeneity and translation invariance") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0, 1);
    int n = 300;
    Eigen::MatrixXd e(n, 4);
    std::vector<int> s(n), mask(n);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < 4; ++c) e(i, c) = gauss(rng);
        s[i] = bit(rng);
        mask[i] = i;
    }
    double base = distance_based_bias(e, s, mask);
    CHECK(std::abs(base - distance_bias_oracle(e, s, mask)) <= 1e-12 * base);

    Eigen::MatrixXd doubled = 2 * e;
    CHECK(distance_based_bias(doubled, s, mask) == doctest::Approx(base / 4.0));

    Eigen::MatrixXd shifted = e;
    shifted.rowwise() += Eigen::RowVector4d(1, -2, 3, 4);
    CHECK(distance_based_bias(shifted, s, mask) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("distance_based_bias degenerate cloud returns infinity") {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(4, 2);
    std::vector<int> s = {0, 0, 1, 1};
    std::vector<int> mask = {0, 1, 2, 3};
    CHECK(std::isinf(distance_based_bias(e, s, mask)));
}

TEST_CASE("relative_reduction") {
    CHECK(relative_reduction(0.0155, 0.0781) == doctest::Approx(80.0).epsilon(0.005));
    CHECK(relative_reduction(0.3, 0.3) == doctest::Approx(0.0));
    CHECK(relative_reduction(0.0, 0.5) == doctest::Approx(100.0));
    CHECK(relative_reduction(0.6, 0.3) < 0.0);
    CHECK_THROWS_AS(relative_reduction(0.1, 0.0), std::domain_error);
}

TEST_CASE("probe recovers a perfectly separable sensitive attribute") {
    int n = 200;
    std::vector<std::pair<int, int>> edges;
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int t = 0; t < 400; ++t) {
        int u = pick(rng), v = pick(rng);
        if (u != v) edges.emplace_back(u, v);
    }
    std::vector<int> s(n), labels(n, 0);
    Eigen::MatrixXd emb(n, 2);
    for (int i = 0; i < n; ++i) {
        s[i] = i % 2;
        emb(i, 0) = s[i] ? 1.0 : 0.0;
        emb(i, 1) = s[i] ? 0.0 : 1.0;
    }
    Graph g = build_graph(n, edges, emb, s, labels);
    SplitMasks splits = make_splits(g, 0.5, 0.25, 0.25, 2);
    ProbeReport r = probe_sensitive_leakage(emb, g, splits);
    CHECK(r.overall_accuracy >= 0.99);
    int covered = 0;
    for (const auto& b : r.bins) covered += b.count;
    CHECK(covered == static_cast<int>(splits.test.size()));
}

TEST_CASE("probe on independent noise stays near the base rate") {
    int n = 600;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0, 1);
    std::vector<int> s(n), labels(n, 0);
    Eigen::MatrixXd emb(n, 6);
    int majority_count = 0;
    for (int i = 0; i < n; ++i) {
        s[i] = (i % 10) < 6;  // 60/40 split, group 1 majority
        majority_count += s[i];
        for (int c = 0; c < 6; ++c) emb(i, c) = gauss(rng);
    }
    Graph g = build_graph(n, {{0, 1}}, emb, s, labels);
    SplitMasks splits = make_splits(g, 0.5, 0.25, 0.25, 3);
    ProbeReport r = probe_sensitive_leakage(emb, g, splits);
    double base = static_cast<double>(majority_count) / n;
    double se = std::sqrt(base * (1 - base) / splits.test.size());
    CHECK(std::abs(r.overall_accuracy - base) <= 5 * se);
}

TEST_CASE("empty probe bins report absent accuracy") {
    ProbeBin empty;
    CHECK(empty.count == 0);
    CHECK(!empty.accuracy.has_value());
}

TEST_CASE("fairness report serialization is stable") {
    FairnessReport r;
    r.acc = 0.75;
    r.auc = 0.8;
    r.delta_sp = 0.1;
    r.delta_eo = 0.05;
    r.n_eval = 100;
    CHECK(r.to_json() == r.to_json());
    CHECK(FairnessReport::csv_header() ==
          "acc,auc,delta_sp,delta_eo,distance_bias,n_eval");
    CHECK(r.to_csv_row().find("0.75") == 0);
}
