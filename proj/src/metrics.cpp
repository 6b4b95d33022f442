#include "bemap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace bemap {

double delta_sp(const std::vector<int>& pred, const std::vector<int>& sensitive,
                const std::vector<int>& mask) {
    long n[2] = {0, 0}, pos[2] = {0, 0};
    for (int i : mask) {
        int s = sensitive[i];
        n[s]++;
        pos[s] += (pred[i] == 1);
    }
    if (n[0] == 0 || n[1] == 0)
        throw std::domain_error("delta_sp: a demographic group is absent from the mask");
    return std::abs(static_cast<double>(pos[1]) / n[1] - static_cast<double>(pos[0]) / n[0]);
}

double delta_eo(const std::vector<int>& pred, const std::vector<int>& labels,
                const std::vector<int>& sensitive, const std::vector<int>& mask) {
    long n[2] = {0, 0}, tp[2] = {0, 0};
    for (int i : mask) {
        if (labels[i] != 1) continue;
        int s = sensitive[i];
        n[s]++;
        tp[s] += (pred[i] == 1);
    }
    if (n[0] == 0 || n[1] == 0)
        throw std::domain_error("delta_eo: a group has no positive-labeled node in the mask");
    return std::abs(static_cast<double>(tp[1]) / n[1] - static_cast<double>(tp[0]) / n[0]);
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels,
           const std::vector<int>& mask) {
    std::vector<std::pair<double, int>> items;
    items.reserve(mask.size());
    long npos = 0, nneg = 0;
    for (int i : mask) {
        items.emplace_back(scores[i], labels[i]);
        (labels[i] == 1 ? npos : nneg)++;
    }
    if (npos == 0 || nneg == 0)
        throw std::domain_error("auc: a class is absent from the mask");
    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // rank-sum with average ranks over ties
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].first == items[i].first) ++j;
        double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t)
            if (items[t].second == 1) rank_sum_pos += avg_rank;
        i = j;
    }
    double u = rank_sum_pos - static_cast<double>(npos) * (npos + 1) / 2.0;
    return u / (static_cast<double>(npos) * static_cast<double>(nneg));
}

double distance_based_bias(const Eigen::MatrixXd& embeddings,
                           const std::vector<int>& sensitive,
                           const std::vector<int>& mask) {
    int num_groups = 0;
    for (int i : mask) num_groups = std::max(num_groups, sensitive[i] + 1);
    std::vector<Eigen::RowVectorXd> centroid(num_groups,
                                             Eigen::RowVectorXd::Zero(embeddings.cols()));
    std::vector<long> count(num_groups, 0);
    for (int i : mask) {
        centroid[sensitive[i]] += embeddings.row(i);
        count[sensitive[i]]++;
    }
    for (int s = 0; s < num_groups; ++s) {
        if (count[s] == 0) throw std::domain_error("distance_based_bias: empty group");
        centroid[s] /= static_cast<double>(count[s]);
    }
    double mean_sq = 0.0;
    for (int i : mask)
        mean_sq += (embeddings.row(i) - centroid[sensitive[i]]).squaredNorm();
    mean_sq /= static_cast<double>(mask.size());
    if (mean_sq == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / mean_sq;
}

double relative_reduction(double delta_method, double delta_vanilla) {
    if (delta_vanilla <= 0.0)
        throw std::domain_error("relative_reduction: vanilla delta must be > 0");
    return (1.0 - delta_method / delta_vanilla) * 100.0;
}

std::vector<int> LogisticModel::predict(const Eigen::MatrixXd& x) const {
    std::vector<int> out(x.rows());
    Eigen::VectorXd z = x * w;
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = (z[i] + b > 0.0) ? 1 : 0;
    return out;
}

LogisticModel fit_logistic(const Eigen::MatrixXd& x, const std::vector<int>& y,
                           const std::vector<int>& mask, const LogisticConfig& cfg) {
    const auto m = static_cast<double>(mask.size());
    Eigen::MatrixXd xm(mask.size(), x.cols());
    Eigen::VectorXd ym(mask.size());
    for (std::size_t r = 0; r < mask.size(); ++r) {
        xm.row(static_cast<Eigen::Index>(r)) = x.row(mask[r]);
        ym[static_cast<Eigen::Index>(r)] = y[mask[r]];
    }
    LogisticModel model;
    model.w = Eigen::VectorXd::Zero(x.cols());
    model.b = 0.0;
    for (int it = 0; it < cfg.iterations; ++it) {
        Eigen::VectorXd z = xm * model.w;
        z.array() += model.b;
        Eigen::VectorXd p = (1.0 / (1.0 + (-z.array()).exp())).matrix();
        Eigen::VectorXd err = p - ym;
        model.w -= cfg.lr * (xm.transpose() * err) / m;
        model.b -= cfg.lr * err.sum() / m;
    }
    return model;
}

ProbeReport probe_sensitive_leakage(const Eigen::MatrixXd& embeddings,
                                    const Graph& g, const SplitMasks& splits,
                                    const LogisticConfig& cfg) {
    if (g.num_groups != 2)
        throw std::invalid_argument("probe_sensitive_leakage: binary sensitive attribute required");
    LogisticModel probe = fit_logistic(embeddings, g.sensitive, splits.train, cfg);
    std::vector<int> pred = probe.predict(embeddings);

    ProbeReport report;
    report.bins.resize(10);
    std::vector<int> hits(10, 0);
    long total_hits = 0;
    for (int i : splits.test) {
        double r = majority_neighbor_ratio(g, i);
        int b = std::min(9, static_cast<int>(r * 10.0));
        report.bins[b].count++;
        int ok = (pred[i] == g.sensitive[i]);
        hits[b] += ok;
        total_hits += ok;
    }
    for (int b = 0; b < 10; ++b)
        if (report.bins[b].count > 0)
            report.bins[b].accuracy =
                static_cast<double>(hits[b]) / report.bins[b].count;
    report.overall_accuracy = splits.test.empty()
                                  ? 0.0
                                  : static_cast<double>(total_hits) / splits.test.size();
    return report;
}

std::string FairnessReport::to_json() const {
    nlohmann::ordered_json j;
    j["acc"] = acc;
    j["auc"] = auc;
    j["delta_sp"] = delta_sp;
    j["delta_eo"] = delta_eo;
    if (distance_bias)
        j["distance_bias"] = *distance_bias;
    else
        j["distance_bias"] = nullptr;
    j["n_eval"] = n_eval;
    return j.dump();
}

std::string FairnessReport::csv_header() {
    return "acc,auc,delta_sp,delta_eo,distance_bias,n_eval";
}

std::string FairnessReport::to_csv_row() const {
    std::ostringstream os;
    os.precision(10);
    os << acc << "," << auc << "," << delta_sp << "," << delta_eo << ",";
    if (distance_bias) os << *distance_bias;
    os << "," << n_eval;
    return os.str();
}

FairnessReport evaluate_fairness(const std::vector<int>& pred,
                                 const std::vector<double>& scores,
                                 const std::vector<int>& labels,
                                 const std::vector<int>& sensitive,
                                 const std::vector<int>& mask) {
    FairnessReport r;
    r.n_eval = static_cast<int>(mask.size());
    int hit = 0;
    for (int i : mask) hit += (pred[i] == labels[i]);
    r.acc = mask.empty() ? 0.0 : static_cast<double>(hit) / mask.size();
    r.auc = auc(scores, labels, mask);
    r.delta_sp = delta_sp(pred, sensitive, mask);
    r.delta_eo = delta_eo(pred, labels, sensitive, mask);
    return r;
}

}  // namespace bemap
