#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "bemap/graph.hpp"

namespace bemap {

/// |Pr(yhat=1 | s=1) - Pr(yhat=1 | s=0)| over the mask.
/// Throws std::domain_error if a group is absent.
double delta_sp(const std::vector<int>& pred, const std::vector<int>& sensitive,
                const std::vector<int>& mask);

/// |Pr(yhat=1 | y=1, s=1) - Pr(yhat=1 | y=1, s=0)| over the mask.
/// Throws std::domain_error if a group has no positive-labeled node.
double delta_eo(const std::vector<int>& pred, const std::vector<int>& labels,
                const std::vector<int>& sensitive, const std::vector<int>& mask);

/// Mann-Whitney AUC with ties counted 1/2. Throws std::domain_error when a
/// class is missing.
double auc(const std::vector<double>& scores, const std::vector<int>& labels,
           const std::vector<int>& mask);

/// Reciprocal of the mean squared distance from each vector to its group
/// centroid. Returns +inf with all vectors exactly at their centroids.
double distance_based_bias(const Eigen::MatrixXd& embeddings,
                           const std::vector<int>& sensitive,
                           const std::vector<int>& mask);

/// (1 - delta_method / delta_vanilla) * 100. Throws std::domain_error at
/// delta_vanilla == 0.
double relative_reduction(double delta_method, double delta_vanilla);

struct ProbeBin {
    int count = 0;
    std::optional<double> accuracy;  // absent when the bin is empty
};

struct ProbeReport {
    std::vector<ProbeBin> bins;  // 10 bins over majority neighbor ratio
    double overall_accuracy = 0.0;
};

struct LogisticConfig {
    int iterations = 500;
    double lr = 0.1;
};

/// Full-batch gradient-descent logistic regression on the embeddings.
struct LogisticModel {
    Eigen::VectorXd w;
    double b = 0.0;
    std::vector<int> predict(const Eigen::MatrixXd& x) const;
};
LogisticModel fit_logistic(const Eigen::MatrixXd& x, const std::vector<int>& y,
                           const std::vector<int>& mask,
                           const LogisticConfig& cfg = {});

/// Trains a logistic probe embeddings -> sensitive attribute on the train
/// mask and reports test accuracy per majority-neighbor-ratio bin.
ProbeReport probe_sensitive_leakage(const Eigen::MatrixXd& embeddings,
                                    const Graph& g, const SplitMasks& splits,
                                    const LogisticConfig& cfg = {});

struct FairnessReport {
    double acc = 0.0;
    double auc = 0.0;
    double delta_sp = 0.0;
    double delta_eo = 0.0;
    std::optional<double> distance_bias;
    int n_eval = 0;

    std::string to_json() const;
    static std::string csv_header();
    std::string to_csv_row() const;
};

FairnessReport evaluate_fairness(const std::vector<int>& pred,
                                 const std::vector<double>& scores,
                                 const std::vector<int>& labels,
                                 const std::vector<int>& sensitive,
                                 const std::vector<int>& mask);

}  // namespace bemap
