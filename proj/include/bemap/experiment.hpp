#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "bemap/graph.hpp"
#include "bemap/metrics.hpp"
#include "bemap/model.hpp"
#include "bemap/theory.hpp"

namespace bemap {

/// One canonical config drives every subcommand; CLI flags override keys.
struct ExperimentConfig {
    // dataset: either file paths or a synthetic spec
    std::string edge_list;
    std::string node_table;
    bool synthetic = true;
    BiasedSyntheticSpec synthetic_spec;
    std::uint64_t synthetic_seed = 1;

    double train_frac = 0.5, val_frac = 0.25, test_frac = 0.25;
    std::uint64_t split_seed = 7;

    int hidden = 128;
    std::string activation = "relu";
    std::string norm = "row";
    bool mlp = false;

    double lr = 1e-3;
    double weight_decay = 1e-5;
    int epochs = 1000;
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};

    std::vector<std::string> sampler_modes = {"none", "bemap"};
    double beta = 0.25;
    double delta = 1.0;
    int hops = 2;

    theory::VerificationConfig theory;

    std::string out_dir = "out";

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    nlohmann::ordered_json to_json() const;
    std::string config_hash() const;
    void validate() const;  // throws std::invalid_argument
};

struct SummaryRow {
    std::string mode;
    double acc_mean, acc_std;
    double auc_mean, auc_std;
    double dsp_mean, dsp_std;
    double deo_mean, deo_std;
};

/// Loads or synthesizes the configured dataset.
Graph load_dataset(const ExperimentConfig& cfg);

/// Trains every (sampler mode, seed) pair, persists per-epoch logs
/// (epochs_<mode>_<seed>.jsonl), per-run results (results_<mode>_<seed>.json),
/// summary.csv and manifest.json under cfg.out_dir.
std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg);

/// Trains a GCN and an MLP, probes their layer-1 embeddings for sensitive
/// attribute leakage, and writes probe.json (per-bin accuracies for both
/// models plus the neighbor-ratio histogram).
nlohmann::ordered_json run_probe(const ExperimentConfig& cfg);

/// Runs the Monte-Carlo theory checks; writes theory_report.jsonl.
/// Returns false iff any check failed.
bool run_theory(const ExperimentConfig& cfg);

/// Rebuilds summary.csv from the per-run results files in cfg.out_dir.
std::vector<SummaryRow> rebuild_summary(const ExperimentConfig& cfg);

}  // namespace bemap
