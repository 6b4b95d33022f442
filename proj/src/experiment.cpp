#include "bemap/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "bemap/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace bemap {

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        if (d.contains("edge_list") || d.contains("node_table")) {
            c.synthetic = false;
            maybe(d, "edge_list", c.edge_list);
            maybe(d, "node_table", c.node_table);
        }
        if (d.contains("synthetic")) {
            c.synthetic = true;
            const auto& s = d.at("synthetic");
            maybe(s, "n", c.synthetic_spec.n);
            maybe(s, "p_in", c.synthetic_spec.p_in);
            maybe(s, "p_out", c.synthetic_spec.p_out);
            maybe(s, "group1_frac", c.synthetic_spec.group1_frac);
            maybe(s, "label_group_corr", c.synthetic_spec.label_group_corr);
            maybe(s, "feature_dim", c.synthetic_spec.feature_dim);
            maybe(s, "label_signal", c.synthetic_spec.label_signal);
            maybe(s, "group_signal", c.synthetic_spec.group_signal);
            maybe(s, "noise", c.synthetic_spec.noise);
            maybe(s, "seed", c.synthetic_seed);
        }
    }
    if (j.contains("split")) {
        const auto& s = j.at("split");
        maybe(s, "train", c.train_frac);
        maybe(s, "val", c.val_frac);
        maybe(s, "test", c.test_frac);
        maybe(s, "seed", c.split_seed);
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        maybe(m, "hidden", c.hidden);
        maybe(m, "activation", c.activation);
        maybe(m, "norm", c.norm);
        maybe(m, "mlp", c.mlp);
    }
    if (j.contains("trainer")) {
        const auto& t = j.at("trainer");
        maybe(t, "lr", c.lr);
        maybe(t, "weight_decay", c.weight_decay);
        maybe(t, "epochs", c.epochs);
        maybe(t, "seeds", c.seeds);
    }
    if (j.contains("sampler")) {
        const auto& s = j.at("sampler");
        if (s.contains("mode")) c.sampler_modes = {s.at("mode").get<std::string>()};
        if (s.contains("modes")) c.sampler_modes = s.at("modes").get<std::vector<std::string>>();
        maybe(s, "beta", c.beta);
        maybe(s, "delta", c.delta);
        maybe(s, "hops", c.hops);
    }
    if (j.contains("theory")) {
        const auto& t = j.at("theory");
        maybe(t, "lemma1_instances", c.theory.lemma1_instances);
        maybe(t, "thm1_n", c.theory.thm1_n);
        maybe(t, "thm1_p", c.theory.thm1_p);
        maybe(t, "thm1_trials", c.theory.thm1_trials);
        maybe(t, "thm1_rel_tol", c.theory.thm1_rel_tol);
        maybe(t, "lemma3_n", c.theory.lemma3_n);
        maybe(t, "lemma3_trials", c.theory.lemma3_trials);
        maybe(t, "lemma3_size", c.theory.lemma3_size);
        maybe(t, "seed", c.theory.seed);
    }
    maybe(j, "out", c.out_dir);
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    json j;
    f >> j;
    return from_json(j);
}

ordered_json ExperimentConfig::to_json() const {
    ordered_json j;
    if (synthetic) {
        j["dataset"]["synthetic"] = {{"n", synthetic_spec.n},
                                     {"p_in", synthetic_spec.p_in},
                                     {"p_out", synthetic_spec.p_out},
                                     {"group1_frac", synthetic_spec.group1_frac},
                                     {"label_group_corr", synthetic_spec.label_group_corr},
                                     {"feature_dim", synthetic_spec.feature_dim},
                                     {"label_signal", synthetic_spec.label_signal},
                                     {"group_signal", synthetic_spec.group_signal},
                                     {"noise", synthetic_spec.noise},
                                     {"seed", synthetic_seed}};
    } else {
        j["dataset"]["edge_list"] = edge_list;
        j["dataset"]["node_table"] = node_table;
    }
    j["split"] = {{"train", train_frac}, {"val", val_frac}, {"test", test_frac}, {"seed", split_seed}};
    j["model"] = {{"hidden", hidden}, {"activation", activation}, {"norm", norm}, {"mlp", mlp}};
    j["trainer"] = {{"lr", lr}, {"weight_decay", weight_decay}, {"epochs", epochs}, {"seeds", seeds}};
    j["sampler"] = {{"modes", sampler_modes}, {"beta", beta}, {"delta", delta}, {"hops", hops}};
    j["theory"] = {{"lemma1_instances", theory.lemma1_instances},
                   {"thm1_n", theory.thm1_n},
                   {"thm1_p", theory.thm1_p},
                   {"thm1_trials", theory.thm1_trials},
                   {"thm1_rel_tol", theory.thm1_rel_tol},
                   {"lemma3_n", theory.lemma3_n},
                   {"lemma3_trials", theory.lemma3_trials},
                   {"lemma3_size", theory.lemma3_size},
                   {"seed", theory.seed}};
    j["out"] = out_dir;
    return j;
}

std::string ExperimentConfig::config_hash() const {
    // FNV-1a over the canonical serialization
    std::string s = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << h;
    return os.str();
}

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
    if (sampler_modes.empty()) throw std::invalid_argument("config: sampler modes must be nonempty");
    for (const auto& m : sampler_modes) sampler_mode_from_string(m);
    activation_from_string(activation);
    norm_mode_from_string(norm);
    if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
    if (beta <= 0.0 || beta > 1.0) throw std::invalid_argument("config: beta must be in (0,1]");
    if (delta <= 0.0) throw std::invalid_argument("config: delta must be > 0");
    if (hops < 1) throw std::invalid_argument("config: hops must be >= 1");
    if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
        throw std::invalid_argument("config: split fractions must sum to 1");
    if (!synthetic && (edge_list.empty() || node_table.empty()))
        throw std::invalid_argument("config: dataset needs edge_list and node_table, or a synthetic spec");
}

Graph load_dataset(const ExperimentConfig& cfg) {
    if (cfg.synthetic) return generate_biased_synthetic(cfg.synthetic_spec, cfg.synthetic_seed);
    return load_graph(cfg.edge_list, cfg.node_table);
}

namespace {

TrainConfig train_config_for(const ExperimentConfig& cfg, SamplerMode mode,
                             std::uint64_t seed, bool mlp) {
    TrainConfig tc;
    tc.hidden = cfg.hidden;
    tc.activation = activation_from_string(cfg.activation);
    tc.mlp = mlp;
    tc.norm_mode = norm_mode_from_string(cfg.norm);
    tc.sampler = mode;
    tc.beta = cfg.beta;
    tc.delta = cfg.delta;
    tc.hops = cfg.hops;
    tc.lr = cfg.lr;
    tc.weight_decay = cfg.weight_decay;
    tc.epochs = cfg.epochs;
    tc.seed = seed;
    return tc;
}

FairnessReport evaluate_run(const Graph& g, const SplitMasks& splits,
                            const GcnParams& params, NormMode norm) {
    EpochGraph full = full_epoch_graph(g, norm);
    ForwardCache cache = forward(params, full, g.features);
    return evaluate_fairness(predict_labels(cache.logits()),
                             predict_scores(cache.logits()), g.labels,
                             g.sensitive, splits.test);
}

void write_manifest(const ExperimentConfig& cfg, const std::string& subcommand) {
    ordered_json m;
    m["subcommand"] = subcommand;
    m["config_hash"] = cfg.config_hash();
    m["seeds"] = cfg.seeds;
    m["version"] = "bemap 0.1.0";
    m["config"] = cfg.to_json();
    std::ofstream f(fs::path(cfg.out_dir) / "manifest.json");
    f << m.dump(2) << "\n";
}

struct RunStats {
    std::vector<double> acc, auc, dsp, deo;
};

std::pair<double, double> mean_std(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());
    return {mean, std::sqrt(var)};
}

void write_summary(const std::string& out_dir, const std::vector<SummaryRow>& rows) {
    std::ofstream f(fs::path(out_dir) / "summary.csv");
    f.precision(10);
    f << "mode,acc_mean,acc_std,auc_mean,auc_std,delta_sp_mean,delta_sp_std,"
         "delta_eo_mean,delta_eo_std\n";
    for (const auto& r : rows)
        f << r.mode << "," << r.acc_mean << "," << r.acc_std << "," << r.auc_mean
          << "," << r.auc_std << "," << r.dsp_mean << "," << r.dsp_std << ","
          << r.deo_mean << "," << r.deo_std << "\n";
}

std::vector<SummaryRow> summarize(const ExperimentConfig& cfg,
                                  const std::vector<std::pair<std::string, RunStats>>& stats) {
    std::vector<SummaryRow> rows;
    for (const auto& [mode, st] : stats) {
        SummaryRow r;
        r.mode = mode;
        std::tie(r.acc_mean, r.acc_std) = mean_std(st.acc);
        std::tie(r.auc_mean, r.auc_std) = mean_std(st.auc);
        std::tie(r.dsp_mean, r.dsp_std) = mean_std(st.dsp);
        std::tie(r.deo_mean, r.deo_std) = mean_std(st.deo);
        rows.push_back(r);
    }
    write_summary(cfg.out_dir, rows);
    return rows;
}

}  // namespace

std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    Graph g = load_dataset(cfg);
    SplitMasks splits = make_splits(g, cfg.train_frac, cfg.val_frac, cfg.test_frac,
                                    cfg.split_seed);
    NormMode norm = norm_mode_from_string(cfg.norm);

    std::vector<std::pair<std::string, RunStats>> stats;
    for (const auto& mode_name : cfg.sampler_modes) {
        SamplerMode mode = sampler_mode_from_string(mode_name);
        RunStats st;
        for (std::uint64_t seed : cfg.seeds) {
            TrainResult tr = train(g, splits, train_config_for(cfg, mode, seed, cfg.mlp));
            FairnessReport rep = evaluate_run(g, splits, tr.params, norm);
            st.acc.push_back(rep.acc);
            st.auc.push_back(rep.auc);
            st.dsp.push_back(rep.delta_sp);
            st.deo.push_back(rep.delta_eo);

            std::string tag = mode_name + "_" + std::to_string(seed);
            {
                std::ofstream f(fs::path(cfg.out_dir) / ("epochs_" + tag + ".jsonl"));
                for (const auto& e : tr.log) {
                    ordered_json j;
                    j["epoch"] = e.epoch;
                    j["train_loss"] = e.train_loss;
                    j["val_loss"] = e.val_loss;
                    j["val_acc"] = e.val_acc;
                    j["val_delta_sp"] = std::isnan(e.val_delta_sp) ? ordered_json() : ordered_json(e.val_delta_sp);
                    j["val_delta_eo"] = std::isnan(e.val_delta_eo) ? ordered_json() : ordered_json(e.val_delta_eo);
                    f << j.dump() << "\n";
                }
            }
            {
                ordered_json j;
                j["mode"] = mode_name;
                j["seed"] = seed;
                j["best_epoch"] = tr.best_epoch;
                j["best_val_acc"] = tr.best_val_acc;
                j["test"] = json::parse(rep.to_json());
                std::ofstream f(fs::path(cfg.out_dir) / ("results_" + tag + ".json"));
                f << j.dump(2) << "\n";
            }
            save_checkpoint(tr.params,
                            (fs::path(cfg.out_dir) / ("model_" + tag + ".ckpt")).string());
        }
        stats.emplace_back(mode_name, std::move(st));
    }
    write_manifest(cfg, "train");
    return summarize(cfg, stats);
}

nlohmann::ordered_json run_probe(const ExperimentConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    Graph g = load_dataset(cfg);
    SplitMasks splits = make_splits(g, cfg.train_frac, cfg.val_frac, cfg.test_frac,
                                    cfg.split_seed);
    NormMode norm = norm_mode_from_string(cfg.norm);
    std::uint64_t seed = cfg.seeds.front();

    TrainResult gcn = train(g, splits, train_config_for(cfg, SamplerMode::None, seed, false));
    TrainResult mlp = train(g, splits, train_config_for(cfg, SamplerMode::None, seed, true));

    EpochGraph full = full_epoch_graph(g, norm);
    Eigen::MatrixXd emb_gcn = extract_embeddings(gcn.params, full, g.features, 1);
    Eigen::MatrixXd emb_mlp = extract_embeddings(mlp.params, full, g.features, 1);

    ProbeReport pr_gcn = probe_sensitive_leakage(emb_gcn, g, splits);
    ProbeReport pr_mlp = probe_sensitive_leakage(emb_mlp, g, splits);

    auto bins_json = [](const ProbeReport& pr) {
        ordered_json arr = ordered_json::array();
        for (int b = 0; b < 10; ++b) {
            ordered_json e;
            e["bin_lo"] = b / 10.0;
            e["bin_hi"] = (b + 1) / 10.0;
            e["count"] = pr.bins[b].count;
            if (pr.bins[b].accuracy)
                e["accuracy"] = *pr.bins[b].accuracy;
            // empty bins are reported with count 0 and no accuracy key
            arr.push_back(e);
        }
        return arr;
    };

    std::vector<int> all_nodes(g.n);
    for (int i = 0; i < g.n; ++i) all_nodes[i] = i;
    ordered_json out;
    out["neighbor_ratio_histogram"] = neighbor_ratio_histogram(g, all_nodes);
    out["gcn"] = {{"overall_accuracy", pr_gcn.overall_accuracy}, {"bins", bins_json(pr_gcn)}};
    out["mlp"] = {{"overall_accuracy", pr_mlp.overall_accuracy}, {"bins", bins_json(pr_mlp)}};

    std::ofstream f(fs::path(cfg.out_dir) / "probe.json");
    f << out.dump(2) << "\n";
    write_manifest(cfg, "probe");
    return out;
}

bool run_theory(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    auto checks = theory::run_all(cfg.theory);
    bool all_pass = true;
    std::ofstream f(fs::path(cfg.out_dir) / "theory_report.jsonl");
    for (const auto& c : checks) {
        ordered_json j;
        j["claim"] = c.claim;
        j["predicted"] = c.predicted;
        j["empirical"] = c.empirical;
        j["tolerance"] = c.tolerance;
        j["pass"] = c.pass;
        if (!c.note.empty()) j["note"] = c.note;
        f << j.dump() << "\n";
        all_pass = all_pass && c.pass;
    }
    write_manifest(cfg, "theory");
    return all_pass;
}

std::vector<SummaryRow> rebuild_summary(const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, RunStats>> stats;
    for (const auto& mode_name : cfg.sampler_modes) {
        RunStats st;
        for (std::uint64_t seed : cfg.seeds) {
            fs::path p = fs::path(cfg.out_dir) /
                         ("results_" + mode_name + "_" + std::to_string(seed) + ".json");
            std::ifstream f(p);
            if (!f) throw std::runtime_error("missing results file: " + p.string());
            json j;
            f >> j;
            st.acc.push_back(j.at("test").at("acc").get<double>());
            st.auc.push_back(j.at("test").at("auc").get<double>());
            st.dsp.push_back(j.at("test").at("delta_sp").get<double>());
            st.deo.push_back(j.at("test").at("delta_eo").get<double>());
        }
        stats.emplace_back(mode_name, std::move(st));
    }
    return summarize(cfg, stats);
}

}  // namespace bemap
