#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>

#include "bemap/experiment.hpp"

namespace {

// exit codes: 0 success, 1 validation error, 2 check failure
constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kCheckFailure = 2;

struct CommonOpts {
    std::string config_path;
    std::string out_override;
    std::string sampler_override;
    std::int64_t seed_override = -1;
};

bemap::ExperimentConfig load_config(const CommonOpts& opts) {
    bemap::ExperimentConfig cfg = opts.config_path.empty()
                                      ? bemap::ExperimentConfig{}
                                      : bemap::ExperimentConfig::from_file(opts.config_path);
    if (!opts.out_override.empty()) cfg.out_dir = opts.out_override;
    if (!opts.sampler_override.empty()) cfg.sampler_modes = {opts.sampler_override};
    if (opts.seed_override >= 0) cfg.seeds = {static_cast<std::uint64_t>(opts.seed_override)};
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config_path, "JSON config file");
    sub->add_option("--out", opts.out_override, "output directory (overrides config)");
    sub->add_option("--sampler", opts.sampler_override,
                    "sampler mode: none|uniform|degree|bemap (overrides config)");
    sub->add_option("--seed", opts.seed_override, "single seed (overrides config seed list)");
}

void print_summary(const std::vector<bemap::SummaryRow>& rows) {
    std::printf("%-8s %18s %18s %18s %18s\n", "mode", "acc", "auc", "delta_sp", "delta_eo");
    for (const auto& r : rows)
        std::printf("%-8s %9.4f +- %.4f %9.4f +- %.4f %9.4f +- %.4f %9.4f +- %.4f\n",
                    r.mode.c_str(), r.acc_mean, r.acc_std, r.auc_mean, r.auc_std,
                    r.dsp_mean, r.dsp_std, r.deo_mean, r.deo_std);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BeMap: balance-aware neighbor sampling for fair message passing"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto* cmd_train = app.add_subcommand("train", "train models across sampler modes and seeds");
    add_common(cmd_train, opts);
    auto* cmd_probe = app.add_subcommand("probe", "sensitive-attribute leakage probe, MLP vs GCN");
    add_common(cmd_probe, opts);
    auto* cmd_theory = app.add_subcommand("theory", "Monte-Carlo verification of the theory");
    add_common(cmd_theory, opts);
    auto* cmd_report = app.add_subcommand("report", "rebuild summary.csv from per-run results");
    add_common(cmd_report, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        bemap::ExperimentConfig cfg = load_config(opts);
        if (cmd_train->parsed()) {
            print_summary(bemap::run_experiment(cfg));
            return kOk;
        }
        if (cmd_probe->parsed()) {
            auto out = bemap::run_probe(cfg);
            std::cout << "gcn probe accuracy: " << out["gcn"]["overall_accuracy"]
                      << "\nmlp probe accuracy: " << out["mlp"]["overall_accuracy"] << "\n";
            return kOk;
        }
        if (cmd_theory->parsed()) {
            bool pass = bemap::run_theory(cfg);
            std::cout << (pass ? "all theory checks passed\n" : "theory check FAILED\n");
            return pass ? kOk : kCheckFailure;
        }
        if (cmd_report->parsed()) {
            print_summary(bemap::rebuild_summary(cfg));
            return kOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    }
    return kOk;
}
