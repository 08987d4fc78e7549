#include "pgt/experiment.hpp"
#include "pgt/training_trace.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    int epochs = 0;
    std::string out;
    std::string method;
    bool timing = false;

    CLI::Option* seed_opt = nullptr;
    CLI::Option* epochs_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* method_opt = nullptr;
    CLI::Option* timing_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_method) {
    cmd->add_option("--config", o.config_path, "Configuration file to start from")
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", o.sets,
                    "Override one config entry as section.key=value (repeatable)");
    o.seed_opt = cmd->add_option("--seed", o.seed, "Master seed");
    o.epochs_opt = cmd->add_option("--epochs", o.epochs, "Training epochs");
    o.out_opt = cmd->add_option("--out", o.out, "Output CSV path");
    if (with_method) {
        o.method_opt = cmd->add_option(
            "--method", o.method, "pgt-sgd, pgt-adam, backprop-sgd or backprop-adam");
    }
    o.timing_opt = cmd->add_flag("--timing", o.timing,
                                 "Inline the wall-time column instead of the sidecar file");
}

pgt::ExperimentConfig build_config(const CommonOpts& o, const std::string& kind,
                                   const std::string& default_out) {
    pgt::ExperimentConfig cfg;
    if (!o.config_path.empty()) {
        cfg = pgt::ExperimentConfig::load(o.config_path);
    }
    cfg.kind = kind;
    for (const std::string& assignment : o.sets) {
        const auto dot = assignment.find('.');
        const auto eq = assignment.find('=');
        if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
            throw std::invalid_argument("--set expects section.key=value, got '" + assignment +
                                        "'");
        }
        cfg.set(assignment.substr(0, dot), assignment.substr(dot + 1, eq - dot - 1),
                assignment.substr(eq + 1));
    }
    if (o.seed_opt != nullptr && o.seed_opt->count() > 0) cfg.seed = o.seed;
    if (o.epochs_opt != nullptr && o.epochs_opt->count() > 0) cfg.epochs = o.epochs;
    if (o.out_opt != nullptr && o.out_opt->count() > 0) cfg.out = o.out;
    if (o.method_opt != nullptr && o.method_opt->count() > 0) cfg.method = o.method;
    if (o.timing_opt != nullptr && o.timing_opt->count() > 0) cfg.timing = o.timing;
    if (cfg.out.empty()) {
        cfg.out = default_out;
    }
    return cfg;
}

void report_trace(const pgt::TrainingTrace& trace, const pgt::ExperimentConfig& cfg) {
    pgt::write_trace_outputs(trace, cfg);
    int best_epoch = 0;
    const double best = trace.min_test_loss(&best_epoch);
    std::cout << "wrote " << cfg.out << " (" << trace.records.size()
              << " epochs); min test loss " << pgt::format_double(best) << " at epoch "
              << best_epoch << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perturbative gradient training workbench"};
    app.require_subcommand(1);

    CommonOpts mlp_opts, transformer_opts, characterize_opts;
    std::string characterize_reservoir, characterize_task;
    int characterize_taps = 0;

    CLI::App* train_mlp = app.add_subcommand(
        "train-mlp", "Train the tabular classifier that feeds a fixed reservoir");
    add_common(train_mlp, mlp_opts, /*with_method=*/true);

    CLI::App* train_transformer = app.add_subcommand(
        "train-transformer", "Train the encoder-decoder with reservoir feed-forward blocks");
    add_common(train_transformer, transformer_opts, /*with_method=*/true);

    CLI::App* characterize =
        app.add_subcommand("characterize", "Measure reservoir memory capacity (stm / pc)");
    add_common(characterize, characterize_opts, /*with_method=*/false);
    CLI::Option* res_opt = characterize->add_option(
        "--reservoir", characterize_reservoir, "delay-line or frozen-net");
    CLI::Option* task_opt =
        characterize->add_option("--task", characterize_task, "stm, pc or both");
    CLI::Option* taps_opt =
        characterize->add_option("--taps", characterize_taps, "Delay-line length");

    CLI::App* compare = app.add_subcommand("compare", "Tabulate training traces side by side");
    std::vector<std::string> compare_files;
    std::string compare_out;
    compare->add_option("traces", compare_files, "Trace CSV files (two or more)")
        ->required()
        ->expected(2, -1);
    compare->add_option("--out", compare_out, "Write the table here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_mlp->parsed()) {
            const pgt::ExperimentConfig cfg =
                build_config(mlp_opts, "train-mlp", "mlp_trace.csv");
            report_trace(pgt::run_train_mlp(cfg), cfg);
        } else if (train_transformer->parsed()) {
            const pgt::ExperimentConfig cfg =
                build_config(transformer_opts, "train-transformer", "transformer_trace.csv");
            report_trace(pgt::run_train_transformer(cfg), cfg);
        } else if (characterize->parsed()) {
            pgt::ExperimentConfig cfg =
                build_config(characterize_opts, "characterize", "capacity.csv");
            if (res_opt->count() > 0) cfg.characterize_reservoir = characterize_reservoir;
            if (task_opt->count() > 0) cfg.characterize_task = characterize_task;
            if (taps_opt->count() > 0) cfg.taps = characterize_taps;
            const std::vector<pgt::CapacityReport> reports = pgt::run_characterize(cfg);
            std::ofstream os(cfg.out);
            if (!os) {
                throw std::runtime_error("cannot open " + cfg.out);
            }
            pgt::write_capacity_csv(reports, os);
            for (const pgt::CapacityReport& report : reports) {
                std::cout << pgt::to_string(report.task) << " capacity "
                          << pgt::format_double(report.capacity) << " over delays 1.."
                          << report.cor2.size() << "\n";
            }
            std::cout << "wrote " << cfg.out << "\n";
        } else if (compare->parsed()) {
            if (compare_out.empty()) {
                pgt::compare_traces(compare_files, std::cout);
            } else {
                std::ofstream os(compare_out);
                if (!os) {
                    throw std::runtime_error("cannot open " + compare_out);
                }
                pgt::compare_traces(compare_files, os);
                std::cout << "wrote " << compare_out << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
