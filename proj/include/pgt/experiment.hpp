#pragma once

#include "pgt/characterization.hpp"
#include "pgt/data_io.hpp"
#include "pgt/nn_core.hpp"
#include "pgt/param_space.hpp"
#include "pgt/reservoir.hpp"
#include "pgt/reservoir_mlp.hpp"
#include "pgt/training_trace.hpp"
#include "pgt/transformer.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace pgt {

/// Flat key = value configuration grouped in [section] blocks. save() then
/// load() reproduces the exact same configuration.
struct ExperimentConfig {
    // [experiment]
    std::string kind = "train-mlp";  // train-mlp | train-transformer | characterize
    std::string method = "pgt-adam";  // pgt-sgd | pgt-adam | backprop-sgd | backprop-adam
    std::uint64_t seed = 1;
    int epochs = 40;
    std::string out;
    bool timing = false;  // seconds column inline instead of the sidecar file

    // [pgt]
    int pgt_range = 1;
    double pgt_delta = 0.01;
    double pgt_dropout = 0.0;
    double pgt_learning_rate = 1e-3;
    std::string pgt_resample = "per-sample";  // per-sample | per-epoch
    double pgt_adam_beta1 = 0.9;
    double pgt_adam_beta2 = 0.999;
    double pgt_adam_epsilon = 1e-8;

    // [backprop]
    double bp_learning_rate = 1e-3;
    double bp_adam_beta1 = 0.9;
    double bp_adam_beta2 = 0.999;
    double bp_adam_epsilon = 1e-8;

    // [data]
    std::string wdbc_path = "data/wdbc.csv";
    double train_fraction = 0.8;
    std::string seq_task = "copy";  // copy | reverse
    int vocab_size = 16;
    int seq_len = 4;
    int n_train = 250;
    int n_test = 250;

    // [mlp]
    int hidden1 = 200;
    int hidden2 = 200;
    int bottleneck = 5;

    // [reservoir] (frozen-net knobs; dims are fixed by the pipelines)
    std::uint64_t reservoir_seed = 7;
    double reservoir_weight_scale = 1.0;
    int reservoir_loop_count = 2;
    double reservoir_leak = 0.5;
    double reservoir_feedback_scale = 0.9;

    // [transformer]
    int embed_dim = 32;
    int n_heads = 4;
    int max_seq_len = 16;
    bool residual = true;

    // [characterize]
    std::string characterize_reservoir = "delay-line";  // delay-line | frozen-net |
                                                        // frozen-net-stateless
    int taps = 5;
    int t_max = 10;
    int sequence_length = 4000;
    int washout = 100;
    double characterize_train_fraction = 0.6;
    double ridge = 1e-6;
    std::string characterize_task = "both";  // stm | pc | both
    bool parity_include_current = true;

    void validate() const;

    /// Canonical (section.key, value) pairs covering every field, in file
    /// order. Values are shortest round-trip strings.
    std::vector<std::pair<std::string, std::string>> snapshot() const;

    void save(std::ostream& os) const;
    void save(const std::string& path) const;
    static ExperimentConfig load(std::istream& is);
    static ExperimentConfig load(const std::string& path);

    /// Applies one `section.key = value` assignment; throws on unknown keys
    /// or unparseable values.
    void set(const std::string& section, const std::string& key, const std::string& value);

    PGTConfig pgt_config() const;
    BackpropConfig backprop_config() const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Breast-cancer pipeline (front net -> reservoir -> readout). Reported
/// losses are per-output-component means of the summed squared error.
class WdbcModel : public GradientSampleModel {
  public:
    WdbcModel(MlpWithReservoir model, TabularDataset data);

    Eigen::Index parameter_count() const override { return model_.parameter_count(); }
    Eigen::VectorXd parameters() const override { return model_.parameters(); }
    void set_parameters(const Eigen::VectorXd& theta) override { model_.set_parameters(theta); }
    std::size_t train_size() const override { return data_.train_indices.size(); }
    std::size_t test_size() const override { return data_.test_indices.size(); }
    double train_loss(std::size_t index) override;
    double test_loss(std::size_t index) override;
    double train_loss_and_gradient(std::size_t index, Eigen::VectorXd& grad) override;

    const MlpWithReservoir& network() const { return model_; }
    const TabularDataset& data() const { return data_; }

  private:
    double sample_loss(Eigen::Index row) const;
    MlpWithReservoir model_;
    TabularDataset data_;
};

/// Sequence-to-sequence pipeline; losses are per-component means over the
/// target length times the embedding width.
class Seq2SeqModel : public GradientSampleModel {
  public:
    Seq2SeqModel(ReservoirTransformer model, SequencePairDataset data);

    Eigen::Index parameter_count() const override { return model_.parameter_count(); }
    Eigen::VectorXd parameters() const override { return model_.parameters(); }
    void set_parameters(const Eigen::VectorXd& theta) override { model_.set_parameters(theta); }
    std::size_t train_size() const override { return data_.train_src.size(); }
    std::size_t test_size() const override { return data_.test_src.size(); }
    double train_loss(std::size_t index) override;
    double test_loss(std::size_t index) override;
    double train_loss_and_gradient(std::size_t index, Eigen::VectorXd& grad) override;

    const ReservoirTransformer& network() const { return model_; }
    const SequencePairDataset& data() const { return data_; }

  private:
    double normalizer(const std::vector<int>& tgt) const;
    ReservoirTransformer model_;
    SequencePairDataset data_;
};

/// Builds the standard frozen-net device used by the training pipelines.
std::shared_ptr<FrozenNetReservoir> make_frozen_net(const ExperimentConfig& cfg, bool stateful);

WdbcModel build_wdbc_model(const ExperimentConfig& cfg);
Seq2SeqModel build_seq2seq_model(const ExperimentConfig& cfg);

TrainingTrace run_train_mlp(const ExperimentConfig& cfg);
TrainingTrace run_train_transformer(const ExperimentConfig& cfg);
std::vector<CapacityReport> run_characterize(const ExperimentConfig& cfg);

/// Writes the trace to cfg.out (plus the timing sidecar `<out>.timing.csv`
/// when timing is not inlined).
void write_trace_outputs(const TrainingTrace& trace, const ExperimentConfig& cfg);

void write_capacity_csv(const std::vector<CapacityReport>& reports, std::ostream& os);

/// Side-by-side table of previously written traces, truncated to the common
/// epoch range, with test-loss deltas against the first trace.
void compare_traces(const std::vector<std::string>& paths, std::ostream& os);

}  // namespace pgt
