#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bemap/graph.hpp"
#include "bemap/sampling.hpp"

namespace bemap {

enum class Activation { Relu, Linear };
Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

struct AdamState {
    std::vector<Eigen::MatrixXd> m, v;
    long step = 0;
};

/// Stacked GCN/MLP weights plus optimizer state. use_message_passing=false
/// turns the model into a plain MLP over node features.
struct GcnParams {
    std::vector<Eigen::MatrixXd> weights;  // layer l: d_l x d_{l+1}
    Activation activation = Activation::Relu;
    bool use_message_passing = true;
    AdamState adam;

    int num_layers() const { return static_cast<int>(weights.size()); }
};

/// Glorot-uniform initialization for dims = {F, hidden, ..., classes}.
GcnParams init_params(const std::vector<int>& dims, Activation act,
                      bool use_message_passing, std::uint64_t seed);

/// Y_i = alpha_ii X_i + sum_j alpha_ij X_j over retained neighborhoods.
Eigen::MatrixXd aggregate(const EpochGraph& eg, const Eigen::MatrixXd& x);
Eigen::MatrixXd aggregate_serial(const EpochGraph& eg, const Eigen::MatrixXd& x);
/// Transpose aggregation (gradient of aggregate w.r.t. its input).
Eigen::MatrixXd aggregate_transpose(const EpochGraph& eg, const Eigen::MatrixXd& g);
Eigen::MatrixXd aggregate_transpose_serial(const EpochGraph& eg, const Eigen::MatrixXd& g);

struct ForwardCache {
    std::vector<Eigen::MatrixXd> inputs;      // H^(l), inputs[0] = X
    std::vector<Eigen::MatrixXd> aggregated;  // \hat H^(l)
    std::vector<Eigen::MatrixXd> preact;      // \hat H^(l) W^(l)
    const Eigen::MatrixXd& logits() const { return inputs.back(); }
};

ForwardCache forward(const GcnParams& params, const EpochGraph& eg,
                     const Eigen::MatrixXd& features);

struct LossGrads {
    double loss = 0.0;
    std::vector<Eigen::MatrixXd> grads;
};

/// Mean softmax cross-entropy over train_mask plus (wd/2)*||W||_F^2, with
/// exact gradients for the fixed EpochGraph.
LossGrads loss_and_grads(const GcnParams& params, const EpochGraph& eg,
                         const Eigen::MatrixXd& features,
                         const std::vector<int>& labels,
                         const std::vector<int>& train_mask,
                         double weight_decay);

void adam_step(GcnParams& params, const std::vector<Eigen::MatrixXd>& grads,
               double lr, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8);

/// Post-activation hidden representations at the given layer (1-based).
Eigen::MatrixXd extract_embeddings(const GcnParams& params, const EpochGraph& eg,
                                   const Eigen::MatrixXd& features, int layer);

struct TrainConfig {
    int hidden = 128;
    Activation activation = Activation::Relu;
    bool mlp = false;
    NormMode norm_mode = NormMode::Row;
    SamplerMode sampler = SamplerMode::None;
    double beta = 0.25;
    double delta = 1.0;
    int hops = 2;
    double lr = 1e-3;
    double weight_decay = 1e-5;
    int epochs = 1000;
    std::uint64_t seed = 0;
};

struct EpochRecord {
    int epoch;
    double train_loss;
    double val_loss;
    double val_acc;
    double val_delta_sp;  // NaN when undefined on the split
    double val_delta_eo;
};

struct TrainResult {
    GcnParams params;  // best-validation-accuracy checkpoint
    std::vector<EpochRecord> log;
    int best_epoch = -1;
    double best_val_acc = 0.0;
};

TrainResult train(const Graph& g, const SplitMasks& splits, const TrainConfig& cfg);

/// Argmax class predictions from logits.
std::vector<int> predict_labels(const Eigen::MatrixXd& logits);
/// Softmax probability of class 1 (binary scoring for AUC).
std::vector<double> predict_scores(const Eigen::MatrixXd& logits);

void save_checkpoint(const GcnParams& params, const std::string& path);
GcnParams load_checkpoint(const std::string& path);

}  // namespace bemap
