#include "bemap/theory.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "bemap/graph.hpp"
#include "bemap/rng.hpp"

namespace bemap::theory {

namespace {

Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::mt19937_64& rng,
                                double stddev = 1.0) {
    std::normal_distribution<double> gauss(0.0, stddev);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
    return m;
}

// Row-normalized adjacency of a Gilbert draw with min degree >= 1.
Eigen::MatrixXd row_normalized_gilbert(int n, double p, std::mt19937_64& rng,
                                       int max_tries = 200) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (unif(rng) < p) a(i, j) = a(j, i) = 1.0;
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) ok = a.row(i).sum() > 0.0;
        if (!ok) continue;
        for (int i = 0; i < n; ++i) a.row(i) /= a.row(i).sum();
        return a;
    }
    throw std::runtime_error("row_normalized_gilbert: could not avoid isolated nodes");
}

std::pair<Eigen::RowVectorXd, Eigen::RowVectorXd> group_means(const ResidualSpec& spec) {
    Eigen::RowVectorXd mu0 = Eigen::RowVectorXd::Zero(spec.dim);
    Eigen::RowVectorXd mu1 = Eigen::RowVectorXd::Zero(spec.dim);
    mu0[0] = -spec.centroid_separation / 2.0;
    mu1[0] = spec.centroid_separation / 2.0;
    return {mu0, mu1};
}

}  // namespace

Lemma1Result verify_lemma1(int n, int dim, int layers, std::uint64_t seed) {
    std::mt19937_64 rng(splitmix64(seed ^ 0x11b111ULL));
    const int max_tries = 20;
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        Eigen::MatrixXd a_tilde = row_normalized_gilbert(n, 0.5, rng);
        Eigen::MatrixXd a_pow = Eigen::MatrixXd::Identity(n, n);
        for (int l = 0; l < layers; ++l) a_pow = a_tilde * a_pow;

        Eigen::FullPivLU<Eigen::MatrixXd> lu_a(a_pow);
        if (!lu_a.isInvertible() || lu_a.rcond() < 1e-8) continue;

        std::vector<Eigen::MatrixXd> w(layers);
        Eigen::MatrixXd w_prod = Eigen::MatrixXd::Identity(dim, dim);
        for (int l = 0; l < layers; ++l) {
            w[l] = gaussian_matrix(dim, dim, rng);
            w_prod = w_prod * w[l];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu_w(w_prod);
        if (!lu_w.isInvertible() || lu_w.rcond() < 1e-8) continue;

        Eigen::MatrixXd z_t = gaussian_matrix(n, dim, rng);
        Eigen::MatrixXd z_b = gaussian_matrix(n, dim, rng);

        // X chosen so the linear GCN's final embedding equals z_t + z_b;
        // the pseudoinverses in the decomposition become plain inverses.
        Eigen::MatrixXd w_inv = lu_w.inverse();
        Eigen::MatrixXd x = lu_a.solve(z_t + z_b) * w_inv;
        Eigen::MatrixXd t1 = lu_a.solve(z_t) * w_inv;
        Eigen::MatrixXd b1 = lu_a.solve(z_b) * w_inv;

        Lemma1Result result;
        Eigen::MatrixXd h = x;        // H^(1)
        Eigen::MatrixXd t = t1, b = b1;
        Eigen::MatrixXd w_chain = Eigen::MatrixXd::Identity(dim, dim);
        for (int l = 1; l <= layers; ++l) {
            Eigen::MatrixXd recon = (t + b) * w_chain;
            result.max_error = std::max(result.max_error,
                                        (h - recon).cwiseAbs().maxCoeff());
            if (l == layers) break;
            w_chain = w_chain * w[l - 1];
            h = a_tilde * h * w[l - 1];
            t = a_tilde * t;
            b = a_tilde * b;
        }
        return result;
    }
    throw std::runtime_error("verify_lemma1: no full-rank instance found");
}

Theorem1Result verify_theorem1(int n, double p, int dim, int trials,
                               std::uint64_t seed, const ResidualSpec& spec) {
    if (trials < 1) throw std::invalid_argument("verify_theorem1: trials must be >= 1");
    std::mt19937_64 rng(splitmix64(seed ^ 0x7331ULL));
    auto [mu0, mu1] = group_means(spec);
    std::normal_distribution<double> gauss(0.0, spec.stddev);
    std::uniform_int_distribution<int> coin(0, 1);

    double pre_sum = 0.0, post_sum = 0.0, inv_deg_sum = 0.0;
    long samples = 0;
    // post-aggregation group centroids: empirical vs predicted location
    Eigen::RowVectorXd post_mean[2] = {Eigen::RowVectorXd::Zero(dim),
                                       Eigen::RowVectorXd::Zero(dim)};
    Eigen::RowVectorXd post_pred[2] = {Eigen::RowVectorXd::Zero(dim),
                                       Eigen::RowVectorXd::Zero(dim)};
    Eigen::RowVectorXd post_sq[2] = {Eigen::RowVectorXd::Zero(dim),
                                     Eigen::RowVectorXd::Zero(dim)};
    long post_count[2] = {0, 0};

    for (int trial = 0; trial < trials; ++trial) {
        Eigen::MatrixXd a_tilde = row_normalized_gilbert(n, p, rng);
        std::vector<int> group(n);
        for (int i = 0; i < n; ++i) group[i] = coin(rng);
        Eigen::MatrixXd b(n, dim);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < dim; ++c) b(i, c) = gauss(rng);
            b.row(i) += group[i] == 0 ? mu0 : mu1;
        }
        Eigen::MatrixXd b_post = a_tilde * b;  // alpha = 1/d_i over N(v_i)
        // conditional post centroid of node i given the draw of graph and
        // groups: mu'_i = (1/d_i) sum_{j in N(i)} mu_{g_j}
        Eigen::MatrixXd mu(n, dim);
        for (int i = 0; i < n; ++i) mu.row(i) = group[i] == 0 ? mu0 : mu1;
        Eigen::MatrixXd mu_post = a_tilde * mu;

        for (int i = 0; i < n; ++i) {
            pre_sum += (b.row(i) - mu.row(i)).squaredNorm();
            post_sum += (b_post.row(i) - mu_post.row(i)).squaredNorm();
            post_mean[group[i]] += b_post.row(i);
            post_pred[group[i]] += mu_post.row(i);
            post_sq[group[i]] += b_post.row(i).array().square().matrix();
            post_count[group[i]]++;
            samples++;
            // degrees recoverable from the normalized row: d_i = 1 / max entry
            inv_deg_sum += 1.0 / std::round(1.0 / a_tilde.row(i).maxCoeff());
        }
    }

    Theorem1Result out;
    out.empirical_ratio = post_sum / pre_sum;
    out.predicted_ratio = inv_deg_sum / static_cast<double>(samples);
    for (int s = 0; s < 2; ++s) {
        if (post_count[s] == 0) continue;
        double cn = static_cast<double>(post_count[s]);
        Eigen::RowVectorXd mean = post_mean[s] / cn;
        Eigen::RowVectorXd var = (post_sq[s] / cn) - mean.array().square().matrix();
        double se = std::sqrt(var.sum() / cn);
        double shift = (mean - post_pred[s] / cn).norm();
        out.centroid_shift = std::max(out.centroid_shift, se > 0 ? shift / se : 0.0);
    }
    return out;
}

Lemma3Theorem2Result verify_lemma3_theorem2(int n, int trials, int neighborhood_size,
                                            std::uint64_t seed,
                                            const ResidualSpec& spec) {
    if (neighborhood_size < 4)
        throw std::invalid_argument("verify_lemma3_theorem2: neighborhood size must be >= 4");
    if (neighborhood_size % 2 != 0)
        throw std::invalid_argument("verify_lemma3_theorem2: neighborhood size must be even");
    std::mt19937_64 rng(splitmix64(seed ^ 0x1e33a3ULL));
    auto [mu0, mu1] = group_means(spec);
    const Eigen::RowVectorXd mu_bar = (mu0 + mu1) / 2.0;
    std::normal_distribution<double> gauss(0.0, spec.stddev);
    const int dim = spec.dim;
    const int m = neighborhood_size;

    auto draw = [&](int group) -> Eigen::RowVectorXd {
        Eigen::RowVectorXd v(dim);
        for (int c = 0; c < dim; ++c) v[c] = gauss(rng);
        return v + (group == 0 ? mu0 : mu1);
    };

    double pre_sum = 0.0, post_sum = 0.0;
    Eigen::RowVectorXd post_mean[2] = {Eigen::RowVectorXd::Zero(dim),
                                       Eigen::RowVectorXd::Zero(dim)};
    Eigen::RowVectorXd post_sq[2] = {Eigen::RowVectorXd::Zero(dim),
                                     Eigen::RowVectorXd::Zero(dim)};
    long post_count[2] = {0, 0};

    for (int trial = 0; trial < trials; ++trial) {
        for (int i = 0; i < n; ++i) {
            int self_group = i % 2;
            Eigen::RowVectorXd b_self = draw(self_group);
            // balanced self-augmented neighborhood: m/2 from each group,
            // the self node counted toward its own group's quota
            Eigen::RowVectorXd agg = b_self;
            int quota[2] = {m / 2, m / 2};
            quota[self_group]--;
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < quota[s]; ++t) agg += draw(s);
            agg /= static_cast<double>(m);

            pre_sum += (b_self - mu_bar).squaredNorm();
            post_sum += (agg - mu_bar).squaredNorm();
            post_mean[self_group] += agg;
            post_sq[self_group] += agg.array().square().matrix();
            post_count[self_group]++;
        }
    }

    Lemma3Theorem2Result out;
    out.shrinkage_ratio = post_sum / pre_sum;
    for (int s = 0; s < 2; ++s) {
        double cn = static_cast<double>(post_count[s]);
        Eigen::RowVectorXd mean = post_mean[s] / cn;
        Eigen::RowVectorXd var = (post_sq[s] / cn) - mean.array().square().matrix();
        double gap = (mean - mu_bar).norm();
        double se3 = 3.0 * std::sqrt(var.sum() / cn);
        out.centroid_gap = std::max(out.centroid_gap, gap);
        out.centroid_gap_3se = std::max(out.centroid_gap_3se, se3);
    }

    // 3:1 control skewed toward the self node's own group: centroids of the
    // two groups should separate
    int cm = ((m + 3) / 4) * 4;
    Eigen::RowVectorXd ctrl_mean[2] = {Eigen::RowVectorXd::Zero(dim),
                                       Eigen::RowVectorXd::Zero(dim)};
    long ctrl_count[2] = {0, 0};
    for (int trial = 0; trial < trials; ++trial) {
        for (int i = 0; i < n; ++i) {
            int self_group = i % 2;
            Eigen::RowVectorXd agg = draw(self_group);
            int quota[2];
            quota[self_group] = 3 * cm / 4 - 1;
            quota[1 - self_group] = cm / 4;
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < quota[s]; ++t) agg += draw(s);
            agg /= static_cast<double>(cm);
            ctrl_mean[self_group] += agg;
            ctrl_count[self_group]++;
        }
    }
    for (int s = 0; s < 2; ++s) ctrl_mean[s] /= static_cast<double>(ctrl_count[s]);
    out.control_group_gap = (ctrl_mean[0] - ctrl_mean[1]).norm();
    return out;
}

std::vector<Check> run_all(const VerificationConfig& cfg) {
    std::vector<Check> checks;

    {
        Check c;
        c.claim = "lemma1_linear_decomposition";
        double worst = 0.0;
        for (int k = 0; k < cfg.lemma1_instances; ++k) {
            auto r = verify_lemma1(cfg.lemma1_n, cfg.lemma1_dim, cfg.lemma1_layers,
                                   cfg.seed + static_cast<std::uint64_t>(k));
            worst = std::max(worst, r.max_error);
        }
        c.predicted = 0.0;
        c.empirical = worst;
        c.tolerance = cfg.lemma1_tol;
        c.pass = worst <= cfg.lemma1_tol;
        checks.push_back(c);
    }

    {
        auto r = verify_theorem1(cfg.thm1_n, cfg.thm1_p, cfg.thm1_dim,
                                 cfg.thm1_trials, cfg.seed);
        Check c;
        c.claim = "theorem1_distance_shrinkage_rate";
        c.predicted = r.predicted_ratio;
        c.empirical = r.empirical_ratio;
        c.tolerance = cfg.thm1_rel_tol;
        double rel = std::abs(r.empirical_ratio / r.predicted_ratio - 1.0);
        c.pass = rel <= cfg.thm1_rel_tol && r.centroid_shift <= 3.0;
        c.note = "centroid_shift_se=" + std::to_string(r.centroid_shift);
        if (cfg.thm1_trials < 30) c.note += "; insufficient-sample: trials < 30";
        checks.push_back(c);
    }

    {
        auto r = verify_lemma3_theorem2(cfg.lemma3_n, cfg.lemma3_trials,
                                        cfg.lemma3_size, cfg.seed);
        Check c;
        c.claim = "lemma3_centroid_consistency";
        c.predicted = 0.0;
        c.empirical = r.centroid_gap;
        c.tolerance = r.centroid_gap_3se;
        c.pass = r.centroid_gap <= r.centroid_gap_3se &&
                 r.control_group_gap > 0.25 * ResidualSpec{}.centroid_separation;
        c.note = "control_group_gap=" + std::to_string(r.control_group_gap);
        checks.push_back(c);

        Check c2;
        c2.claim = "theorem2_fair_distance_shrinkage";
        c2.predicted = 1.0;
        c2.empirical = r.shrinkage_ratio;
        c2.tolerance = 1.0;  // must be strictly below
        c2.pass = r.shrinkage_ratio < 1.0;
        checks.push_back(c2);
    }

    return checks;
}

}  // namespace bemap::theory
