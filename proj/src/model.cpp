#include "bemap/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "bemap/metrics.hpp"
#include "bemap/parallel.hpp"
#include "bemap/rng.hpp"

namespace bemap {

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "linear") return Activation::Linear;
    throw std::invalid_argument("unknown activation: " + s);
}

std::string to_string(Activation a) {
    return a == Activation::Relu ? "relu" : "linear";
}

GcnParams init_params(const std::vector<int>& dims, Activation act,
                      bool use_message_passing, std::uint64_t seed) {
    if (dims.size() < 2) throw std::invalid_argument("init_params: need >= 2 dims");
    GcnParams p;
    p.activation = act;
    p.use_message_passing = use_message_passing;
    std::mt19937_64 rng(splitmix64(seed ^ 0xabcdef0123456789ULL));
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        double r = std::sqrt(6.0 / (dims[l] + dims[l + 1]));
        std::uniform_real_distribution<double> unif(-r, r);
        Eigen::MatrixXd w(dims[l], dims[l + 1]);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = unif(rng);
        p.weights.push_back(std::move(w));
        p.adam.m.emplace_back(Eigen::MatrixXd::Zero(dims[l], dims[l + 1]));
        p.adam.v.emplace_back(Eigen::MatrixXd::Zero(dims[l], dims[l + 1]));
    }
    return p;
}

namespace {

template <typename Loop>
Eigen::MatrixXd aggregate_impl(const EpochGraph& eg, const Eigen::MatrixXd& x, Loop loop) {
    Eigen::MatrixXd y(x.rows(), x.cols());
    loop(eg.n, [&](int i) {
        y.row(i) = eg.self_weight[i] * x.row(i);
        for (int e = eg.offsets[i]; e < eg.offsets[i + 1]; ++e)
            y.row(i) += eg.weights[e] * x.row(eg.neighbors[e]);
    });
    return y;
}

template <typename Loop>
Eigen::MatrixXd aggregate_transpose_impl(const EpochGraph& eg, const Eigen::MatrixXd& g, Loop loop) {
    Eigen::MatrixXd y(g.rows(), g.cols());
    loop(eg.n, [&](int j) {
        y.row(j) = eg.self_weight[j] * g.row(j);
        for (int e = eg.t_offsets[j]; e < eg.t_offsets[j + 1]; ++e)
            y.row(j) += eg.t_weights[e] * g.row(eg.t_neighbors[e]);
    });
    return y;
}

}  // namespace

Eigen::MatrixXd aggregate(const EpochGraph& eg, const Eigen::MatrixXd& x) {
    return aggregate_impl(eg, x, [](int n, auto&& fn) { parallel::for_each_index(n, fn); });
}
Eigen::MatrixXd aggregate_serial(const EpochGraph& eg, const Eigen::MatrixXd& x) {
    return aggregate_impl(eg, x, [](int n, auto&& fn) { parallel::for_each_index_serial(n, fn); });
}
Eigen::MatrixXd aggregate_transpose(const EpochGraph& eg, const Eigen::MatrixXd& g) {
    return aggregate_transpose_impl(eg, g, [](int n, auto&& fn) { parallel::for_each_index(n, fn); });
}
Eigen::MatrixXd aggregate_transpose_serial(const EpochGraph& eg, const Eigen::MatrixXd& g) {
    return aggregate_transpose_impl(eg, g, [](int n, auto&& fn) { parallel::for_each_index_serial(n, fn); });
}

ForwardCache forward(const GcnParams& params, const EpochGraph& eg,
                     const Eigen::MatrixXd& features) {
    if (features.cols() != params.weights.front().rows())
        throw std::invalid_argument("forward: feature dim does not match W[0]");
    const int L = params.num_layers();
    ForwardCache cache;
    cache.inputs.push_back(features);
    for (int l = 0; l < L; ++l) {
        const Eigen::MatrixXd& h = cache.inputs[l];
        Eigen::MatrixXd h_hat = params.use_message_passing ? aggregate(eg, h) : h;
        Eigen::MatrixXd z = h_hat * params.weights[l];
        cache.aggregated.push_back(std::move(h_hat));
        Eigen::MatrixXd next;
        if (l + 1 < L && params.activation == Activation::Relu)
            next = z.cwiseMax(0.0);
        else
            next = z;  // linear hidden layers and the output layer
        cache.preact.push_back(std::move(z));
        cache.inputs.push_back(std::move(next));
    }
    return cache;
}

namespace {

// softmax cross-entropy on the masked rows; fills dlogits for those rows
double masked_softmax_ce(const Eigen::MatrixXd& logits,
                         const std::vector<int>& labels,
                         const std::vector<int>& mask,
                         Eigen::MatrixXd& dlogits) {
    const double inv_m = 1.0 / static_cast<double>(mask.size());
    double loss = 0.0;
    for (int i : mask) {
        Eigen::VectorXd row = logits.row(i);
        double mx = row.maxCoeff();
        Eigen::VectorXd ex = (row.array() - mx).exp();
        double denom = ex.sum();
        Eigen::VectorXd p = ex / denom;
        int y = labels[i];
        loss += -(std::log(p[y] + 1e-300)) * inv_m;
        dlogits.row(i) = (p.transpose() * inv_m);
        dlogits(i, y) -= inv_m;
    }
    return loss;
}

}  // namespace

LossGrads loss_and_grads(const GcnParams& params, const EpochGraph& eg,
                         const Eigen::MatrixXd& features,
                         const std::vector<int>& labels,
                         const std::vector<int>& train_mask,
                         double weight_decay) {
    if (train_mask.empty())
        throw std::invalid_argument("loss_and_grads: empty train mask");
    const int L = params.num_layers();
    ForwardCache cache = forward(params, eg, features);

    Eigen::MatrixXd dz = Eigen::MatrixXd::Zero(features.rows(), params.weights.back().cols());
    LossGrads out;
    out.loss = masked_softmax_ce(cache.logits(), labels, train_mask, dz);
    for (const auto& w : params.weights)
        out.loss += 0.5 * weight_decay * w.squaredNorm();

    out.grads.resize(L);
    for (int l = L - 1; l >= 0; --l) {
        out.grads[l] = cache.aggregated[l].transpose() * dz + weight_decay * params.weights[l];
        if (l == 0) break;
        Eigen::MatrixXd dh_hat = dz * params.weights[l].transpose();
        Eigen::MatrixXd dh = params.use_message_passing ? aggregate_transpose(eg, dh_hat) : dh_hat;
        if (params.activation == Activation::Relu)
            dz = (cache.preact[l - 1].array() > 0.0).cast<double>() * dh.array();
        else
            dz = std::move(dh);
    }
    return out;
}

void adam_step(GcnParams& params, const std::vector<Eigen::MatrixXd>& grads,
               double lr, double beta1, double beta2, double eps) {
    auto& st = params.adam;
    st.step++;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(st.step));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(st.step));
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        st.m[l] = beta1 * st.m[l] + (1.0 - beta1) * grads[l];
        st.v[l] = beta2 * st.v[l].array() + (1.0 - beta2) * grads[l].array().square();
        Eigen::ArrayXXd m_hat = st.m[l].array() / bc1;
        Eigen::ArrayXXd v_hat = st.v[l].array() / bc2;
        params.weights[l].array() -= lr * m_hat / (v_hat.sqrt() + eps);
    }
}

Eigen::MatrixXd extract_embeddings(const GcnParams& params, const EpochGraph& eg,
                                   const Eigen::MatrixXd& features, int layer) {
    if (layer < 1 || layer > params.num_layers())
        throw std::invalid_argument("extract_embeddings: layer out of range");
    return forward(params, eg, features).inputs[layer];
}

std::vector<int> predict_labels(const Eigen::MatrixXd& logits) {
    std::vector<int> out(logits.rows());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Eigen::Index arg;
        logits.row(i).maxCoeff(&arg);
        out[i] = static_cast<int>(arg);
    }
    return out;
}

std::vector<double> predict_scores(const Eigen::MatrixXd& logits) {
    std::vector<double> out(logits.rows());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        double a = logits(i, 0), b = logits(i, 1);
        double mx = std::max(a, b);
        double ea = std::exp(a - mx), eb = std::exp(b - mx);
        out[i] = eb / (ea + eb);
    }
    return out;
}

namespace {

double masked_accuracy(const std::vector<int>& pred, const std::vector<int>& labels,
                       const std::vector<int>& mask) {
    if (mask.empty()) return 0.0;
    int hit = 0;
    for (int i : mask) hit += (pred[i] == labels[i]);
    return static_cast<double>(hit) / static_cast<double>(mask.size());
}

}  // namespace

TrainResult train(const Graph& g, const SplitMasks& splits, const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    std::vector<int> dims = {g.num_features(), cfg.hidden, 2};
    GcnParams params = init_params(dims, cfg.activation, !cfg.mlp, cfg.seed);

    BalanceTable bt;
    if (cfg.sampler != SamplerMode::None)
        bt = compute_balance_table(g, cfg.hops, cfg.delta);
    EpochGraph full = full_epoch_graph(g, cfg.norm_mode);

    TrainResult result;
    result.params = params;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        EpochGraph eg = cfg.sampler == SamplerMode::None
                            ? full
                            : sample_epoch_graph(g, bt, cfg.sampler, cfg.beta,
                                                 cfg.norm_mode, cfg.seed,
                                                 static_cast<std::uint64_t>(epoch));
        LossGrads lg = loss_and_grads(params, eg, g.features, g.labels,
                                      splits.train, cfg.weight_decay);
        adam_step(params, lg.grads, cfg.lr);

        // evaluate on the full neighborhoods with frozen parameters
        ForwardCache eval = forward(params, full, g.features);
        Eigen::MatrixXd dz_unused = Eigen::MatrixXd::Zero(g.n, 2);
        double val_loss = splits.val.empty()
                              ? 0.0
                              : masked_softmax_ce(eval.logits(), g.labels, splits.val, dz_unused);
        std::vector<int> pred = predict_labels(eval.logits());
        double val_acc = masked_accuracy(pred, g.labels, splits.val);

        EpochRecord rec{epoch, lg.loss, val_loss, val_acc,
                        std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN()};
        try {
            rec.val_delta_sp = delta_sp(pred, g.sensitive, splits.val);
            rec.val_delta_eo = delta_eo(pred, g.labels, g.sensitive, splits.val);
        } catch (const std::domain_error&) {
            // a group (or its positives) is absent from the split
        }
        result.log.push_back(rec);

        if (result.best_epoch < 0 || val_acc > result.best_val_acc) {
            result.best_val_acc = val_acc;
            result.best_epoch = epoch;
            result.params = params;
        }
    }
    return result;
}

void save_checkpoint(const GcnParams& params, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write checkpoint: " + path);
    f.precision(17);
    f << "bemap-checkpoint 1\n";
    f << "layers " << params.num_layers() << " activation " << to_string(params.activation)
      << " message_passing " << (params.use_message_passing ? 1 : 0) << "\n";
    for (const auto& w : params.weights) {
        f << "tensor W " << w.rows() << " " << w.cols() << "\n";
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                f << w(i, j) << (j + 1 < w.cols() ? " " : "\n");
        }
    }
}

GcnParams load_checkpoint(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string magic;
    int version;
    f >> magic >> version;
    if (magic != "bemap-checkpoint" || version != 1)
        throw std::runtime_error("bad checkpoint header: " + path);
    std::string kw, act;
    int layers, mp;
    f >> kw >> layers >> kw >> act >> kw >> mp;
    GcnParams p;
    p.activation = activation_from_string(act);
    p.use_message_passing = mp != 0;
    for (int l = 0; l < layers; ++l) {
        std::string t, name;
        Eigen::Index rows, cols;
        f >> t >> name >> rows >> cols;
        if (t != "tensor") throw std::runtime_error("bad checkpoint tensor block: " + path);
        Eigen::MatrixXd w(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) f >> w(i, j);
        p.weights.push_back(std::move(w));
        p.adam.m.emplace_back(Eigen::MatrixXd::Zero(rows, cols));
        p.adam.v.emplace_back(Eigen::MatrixXd::Zero(rows, cols));
    }
    if (!f) throw std::runtime_error("truncated checkpoint: " + path);
    return p;
}

}  // namespace bemap
