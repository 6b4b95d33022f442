#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace bemap {

/// Monte-Carlo checks of the bias-amplification / fair-message-passing theory
/// on Gilbert random graphs. Aggregation here is 1/d_i over the plain 1-hop
/// neighborhood (no self term), matching the setting the statements are
/// proved in; the trainer uses the self-augmented 1/(d_i+1) convention.
namespace theory {

struct ResidualSpec {
    int dim = 8;
    double centroid_separation = 2.0;  // ||mu_0 - mu_1||
    double stddev = 1.0;
};

struct Lemma1Result {
    double max_error = 0.0;  // max elementwise reconstruction error over all layers
};

/// Builds a full-rank instance (invertible row-normalized A^L and square
/// invertible weight chain), splits the final embedding into fair part and
/// residual, and reconstructs every hidden layer from the decomposition.
Lemma1Result verify_lemma1(int n, int dim, int layers, std::uint64_t seed);

struct Theorem1Result {
    double empirical_ratio = 0.0;  // E||b' - mu'||^2 / E||b - mu||^2
    double predicted_ratio = 0.0;  // empirical E[1/d_i]
    // max gap between a group's empirical post centroid and its predicted
    // location (mean of the conditional centroids mu'_i), in standard errors
    double centroid_shift = 0.0;
};

/// One mean-aggregation step over Gilbert graphs: residual distances to the
/// conditional centroids mu'_i = (1/d_i) sum_j mu_{g_j} shrink by E[1/d_i],
/// which is the amplification factor of the distance-based bias measure.
Theorem1Result verify_theorem1(int n, double p, int dim, int trials,
                               std::uint64_t seed, const ResidualSpec& spec = {});

struct Lemma3Theorem2Result {
    double centroid_gap = 0.0;       // max distance of post-step group centroids from mu_bar
    double centroid_gap_3se = 0.0;   // 3-standard-error threshold for that gap
    double shrinkage_ratio = 0.0;    // E||b'-mu_bar||^2 / E||b-mu_bar||^2
    double control_group_gap = 0.0;  // distance between group centroids in the 3:1 control
};

/// Balanced (r0 = r1 = 1/2) self-augmented neighborhoods of the given size:
/// post-step centroids must coincide with mu_bar and the squared distance
/// must shrink. A 3:1 homophilous control shows the centroids separating when
/// the balance condition is dropped.
Lemma3Theorem2Result verify_lemma3_theorem2(int n, int trials, int neighborhood_size,
                                            std::uint64_t seed,
                                            const ResidualSpec& spec = {});

struct Check {
    std::string claim;
    double predicted = 0.0;
    double empirical = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct VerificationConfig {
    int lemma1_instances = 20;
    int lemma1_n = 10;
    int lemma1_dim = 10;
    int lemma1_layers = 2;
    double lemma1_tol = 1e-8;

    int thm1_n = 200;
    double thm1_p = 0.05;
    int thm1_dim = 8;
    int thm1_trials = 1000;
    double thm1_rel_tol = 0.05;

    int lemma3_n = 5000;
    int lemma3_trials = 20;
    int lemma3_size = 4;

    std::uint64_t seed = 0;
};

/// Runs all checks; each Check carries its predicted value, empirical value,
/// tolerance and verdict.
std::vector<Check> run_all(const VerificationConfig& cfg);

}  // namespace theory
}  // namespace bemap
