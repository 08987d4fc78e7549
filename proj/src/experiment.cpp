#include "pgt/experiment.hpp"

#include "pgt/data_io.hpp"
#include "pgt/pgt_engine.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pgt {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value, const std::string& what) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument(what + ": expected true/false, got '" + value + "'");
}

int parse_int(const std::string& value, const std::string& what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(what + ": expected an integer, got '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& value, const std::string& what) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw std::invalid_argument(what + ": expected an unsigned integer, got '" + value +
                                    "'");
    }
}

double parse_double(const std::string& value, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(what + ": expected a number, got '" + value + "'");
    }
}

std::string bool_str(bool v) { return v ? "true" : "false"; }

struct MethodSpec {
    bool is_pgt = false;
    OptimizerKind optimizer = OptimizerKind::Sgd;
};

MethodSpec parse_method(const std::string& method) {
    if (method == "pgt-sgd") return {true, OptimizerKind::Sgd};
    if (method == "pgt-adam") return {true, OptimizerKind::Adam};
    if (method == "backprop-sgd") return {false, OptimizerKind::Sgd};
    if (method == "backprop-adam") return {false, OptimizerKind::Adam};
    throw std::invalid_argument(
        "unknown method '" + method +
        "' (expected pgt-sgd, pgt-adam, backprop-sgd or backprop-adam)");
}

}  // namespace

void ExperimentConfig::validate() const {
    if (kind != "train-mlp" && kind != "train-transformer" && kind != "characterize") {
        throw std::invalid_argument("experiment.kind: unknown kind '" + kind + "'");
    }
    parse_method(method);
    if (epochs <= 0) {
        throw std::invalid_argument("experiment.epochs must be positive");
    }
    pgt_config().validate();
    if (!(bp_learning_rate > 0.0)) {
        throw std::invalid_argument("backprop.learning_rate must be positive");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("data.train_fraction must lie in (0, 1)");
    }
    seq_task_from_string(seq_task);
    if (vocab_size < 2) {
        throw std::invalid_argument("data.vocab_size must be >= 2");
    }
    if (seq_len < 1 || n_train < 1 || n_test < 0) {
        throw std::invalid_argument("data: sequence counts must be positive");
    }
    if (hidden1 < 1 || hidden2 < 1 || bottleneck < 1) {
        throw std::invalid_argument("mlp: widths must be positive");
    }
    if (reservoir_loop_count < 1) {
        throw std::invalid_argument("reservoir.loop_count must be >= 1");
    }
    if (characterize_task != "stm" && characterize_task != "pc" &&
        characterize_task != "both") {
        throw std::invalid_argument("characterize.task: expected stm, pc or both");
    }
    if (characterize_reservoir != "delay-line" && characterize_reservoir != "frozen-net" &&
        characterize_reservoir != "frozen-net-stateless") {
        throw std::invalid_argument("characterize.reservoir: unknown reservoir '" +
                                    characterize_reservoir + "'");
    }
    if (taps < 1) {
        throw std::invalid_argument("characterize.taps must be >= 1");
    }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::snapshot() const {
    std::vector<std::pair<std::string, std::string>> kv;
    auto put = [&](const std::string& key, const std::string& value) {
        kv.emplace_back(key, value);
    };
    put("experiment.kind", kind);
    put("experiment.method", method);
    put("experiment.seed", std::to_string(seed));
    put("experiment.epochs", std::to_string(epochs));
    put("experiment.out", out);
    put("experiment.timing", bool_str(timing));

    put("pgt.range", std::to_string(pgt_range));
    put("pgt.delta", format_double(pgt_delta));
    put("pgt.dropout", format_double(pgt_dropout));
    put("pgt.learning_rate", format_double(pgt_learning_rate));
    put("pgt.resample", pgt_resample);
    put("pgt.adam_beta1", format_double(pgt_adam_beta1));
    put("pgt.adam_beta2", format_double(pgt_adam_beta2));
    put("pgt.adam_epsilon", format_double(pgt_adam_epsilon));

    put("backprop.learning_rate", format_double(bp_learning_rate));
    put("backprop.adam_beta1", format_double(bp_adam_beta1));
    put("backprop.adam_beta2", format_double(bp_adam_beta2));
    put("backprop.adam_epsilon", format_double(bp_adam_epsilon));

    put("data.wdbc_path", wdbc_path);
    put("data.train_fraction", format_double(train_fraction));
    put("data.task", seq_task);
    put("data.vocab_size", std::to_string(vocab_size));
    put("data.seq_len", std::to_string(seq_len));
    put("data.n_train", std::to_string(n_train));
    put("data.n_test", std::to_string(n_test));

    put("mlp.hidden1", std::to_string(hidden1));
    put("mlp.hidden2", std::to_string(hidden2));
    put("mlp.bottleneck", std::to_string(bottleneck));

    put("reservoir.seed", std::to_string(reservoir_seed));
    put("reservoir.weight_scale", format_double(reservoir_weight_scale));
    put("reservoir.loop_count", std::to_string(reservoir_loop_count));
    put("reservoir.leak", format_double(reservoir_leak));
    put("reservoir.feedback_scale", format_double(reservoir_feedback_scale));

    put("transformer.embed_dim", std::to_string(embed_dim));
    put("transformer.n_heads", std::to_string(n_heads));
    put("transformer.max_seq_len", std::to_string(max_seq_len));
    put("transformer.residual", bool_str(residual));

    put("characterize.reservoir", characterize_reservoir);
    put("characterize.taps", std::to_string(taps));
    put("characterize.t_max", std::to_string(t_max));
    put("characterize.sequence_length", std::to_string(sequence_length));
    put("characterize.washout", std::to_string(washout));
    put("characterize.train_fraction", format_double(characterize_train_fraction));
    put("characterize.ridge", format_double(ridge));
    put("characterize.task", characterize_task);
    put("characterize.parity_include_current", bool_str(parity_include_current));
    return kv;
}

void ExperimentConfig::set(const std::string& section, const std::string& key,
                           const std::string& value) {
    const std::string full = section + "." + key;
    if (section == "experiment") {
        if (key == "kind") kind = value;
        else if (key == "method") method = value;
        else if (key == "seed") seed = parse_u64(value, full);
        else if (key == "epochs") epochs = parse_int(value, full);
        else if (key == "out") out = value;
        else if (key == "timing") timing = parse_bool(value, full);
        else throw std::invalid_argument("unknown config key '" + full + "'");
    } else if (section == "pgt") {
        if (key == "range") pgt_range = parse_int(value, full);
        else if (key == "delta") pgt_delta = parse_double(value, full);
        else if (key == "dropout") pgt_dropout = parse_double(value, full);
        else if (key == "learning_rate") pgt_learning_rate = parse_double(value, full);
        else if (key == "resample") pgt_resample = value;
        else if (key == "adam_beta1") pgt_adam_beta1 = parse_double(value, full);
        else if (key == "adam_beta2") pgt_adam_beta2 = parse_double(value, full);
        else if (key == "adam_epsilon") pgt_adam_epsilon = parse_double(value, full);
        else throw std::invalid_argument("unknown config key '" + full + "'");
    } else if (section == "backprop") {
        if (key == "learning_rate") bp_learning_rate = parse_double(value, full);
        else if (key == "adam_beta1") bp_adam_beta1 = parse_double(value, full);
        else if (key == "adam_beta2") bp_adam_beta2 = parse_double(value, full);
        else if (key == "adam_epsilon") bp_adam_epsilon = parse_double(value, full);
        else throw std::invalid_argument("unknown config key '" + full + "'");
    } else if (section == "data") {
        if (key == "wdbc_path") wdbc_path = value;
        else if (key == "train_fraction") train_fraction = parse_double(value, full);
        else if (key == "task") seq_task = value;
        else if (key == "vocab_size") vocab_size = parse_int(value, full);
        else if (key == "seq_len") seq_len = parse_int(value, full);
        else if (key == "n_train") n_train = parse_int(value, full);
        else if (key == "n_test") n_test = parse_int(value, full);
        else throw std::invalid_argument("unknown config key '" + full + "'");
    } else if (section == "mlp") {
        if (key == "hidden1") hidden1 = parse_int(value, full);
        else if (key == "hidden2") hidden2 = parse_int(value, full);
        else if (key == "bottleneck") bottleneck = parse_int(value, full);
        else throw std::invalid_argument("unknown config key '" + full + "'");
    } else if (section == "reservoir") {
        if (key == "seed") reservoir_seed = parse_u64(value, full);
        else if (key == "weight_scale") reservoir_weight_scale = parse_double(value, full);
        else if (key == "loop_count") reservoir_loop_count = parse_int(value, full);
        else if (key == "leak") reservoir_leak = parse_double(value, full);
        else if (key == "feedback_scale") reservoir_feedback_scale = parse_double(value, full);
        else throw std::invalid_argument("unknown config key '" + full + "'");
    } else if (section == "transformer") {
        if (key == "embed_dim") embed_dim = parse_int(value, full);
        else if (key == "n_heads") n_heads = parse_int(value, full);
        else if (key == "max_seq_len") max_seq_len = parse_int(value, full);
        else if (key == "residual") residual = parse_bool(value, full);
        else throw std::invalid_argument("unknown config key '" + full + "'");
    } else if (section == "characterize") {
        if (key == "reservoir") characterize_reservoir = value;
        else if (key == "taps") taps = parse_int(value, full);
        else if (key == "t_max") t_max = parse_int(value, full);
        else if (key == "sequence_length") sequence_length = parse_int(value, full);
        else if (key == "washout") washout = parse_int(value, full);
        else if (key == "train_fraction")
            characterize_train_fraction = parse_double(value, full);
        else if (key == "ridge") ridge = parse_double(value, full);
        else if (key == "task") characterize_task = value;
        else if (key == "parity_include_current")
            parity_include_current = parse_bool(value, full);
        else throw std::invalid_argument("unknown config key '" + full + "'");
    } else {
        throw std::invalid_argument("unknown config section '" + section + "'");
    }
}

void ExperimentConfig::save(std::ostream& os) const {
    std::string section;
    for (const auto& [full, value] : snapshot()) {
        const auto dot = full.find('.');
        const std::string sec = full.substr(0, dot);
        const std::string key = full.substr(dot + 1);
        if (sec != section) {
            if (!section.empty()) os << '\n';
            os << '[' << sec << "]\n";
            section = sec;
        }
        os << key << " = " << value << '\n';
    }
}

void ExperimentConfig::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("ExperimentConfig::save: cannot open " + path);
    }
    save(os);
}

ExperimentConfig ExperimentConfig::load(std::istream& is) {
    ExperimentConfig cfg;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') {
            continue;
        }
        if (text.front() == '[') {
            if (text.back() != ']') {
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": malformed section header");
            }
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        }
        if (section.empty()) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": key outside any [section]");
        }
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        try {
            cfg.set(section, key, value);
        } catch (const std::exception& e) {
            throw std::runtime_error("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("ExperimentConfig::load: cannot open " + path);
    }
    return load(is);
}

PGTConfig ExperimentConfig::pgt_config() const {
    PGTConfig c;
    c.range = pgt_range;
    c.delta = pgt_delta;
    c.dropout_scale = pgt_dropout;
    c.learning_rate = pgt_learning_rate;
    c.adam_beta1 = pgt_adam_beta1;
    c.adam_beta2 = pgt_adam_beta2;
    c.adam_epsilon = pgt_adam_epsilon;
    c.seed = seed;
    if (pgt_resample == "per-sample") {
        c.resample = ResamplePolicy::PerSample;
    } else if (pgt_resample == "per-epoch") {
        c.resample = ResamplePolicy::PerEpoch;
    } else {
        throw std::invalid_argument("pgt.resample: expected per-sample or per-epoch, got '" +
                                    pgt_resample + "'");
    }
    c.optimizer = parse_method(method).optimizer;
    return c;
}

BackpropConfig ExperimentConfig::backprop_config() const {
    BackpropConfig c;
    c.optimizer = parse_method(method).optimizer;
    c.learning_rate = bp_learning_rate;
    c.adam_beta1 = bp_adam_beta1;
    c.adam_beta2 = bp_adam_beta2;
    c.adam_epsilon = bp_adam_epsilon;
    c.seed = seed;
    return c;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.snapshot() == b.snapshot();
}

WdbcModel::WdbcModel(MlpWithReservoir model, TabularDataset data)
    : model_(std::move(model)), data_(std::move(data)) {
    if (data_.train_indices.empty()) {
        throw std::invalid_argument("WdbcModel: empty training split");
    }
}

double WdbcModel::sample_loss(Eigen::Index row) const {
    return model_.loss(data_.features.row(row).transpose(), data_.labels.row(row).transpose()) /
           static_cast<double>(data_.labels.cols());
}

double WdbcModel::train_loss(std::size_t index) {
    return sample_loss(data_.train_indices.at(index));
}

double WdbcModel::test_loss(std::size_t index) {
    return sample_loss(data_.test_indices.at(index));
}

double WdbcModel::train_loss_and_gradient(std::size_t index, Eigen::VectorXd& grad) {
    const Eigen::Index row = data_.train_indices.at(index);
    const double loss = model_.loss_and_gradient(data_.features.row(row).transpose(),
                                                 data_.labels.row(row).transpose(), grad);
    const double k = static_cast<double>(data_.labels.cols());
    grad /= k;
    return loss / k;
}

Seq2SeqModel::Seq2SeqModel(ReservoirTransformer model, SequencePairDataset data)
    : model_(std::move(model)), data_(std::move(data)) {
    if (data_.train_src.empty() || data_.train_src.size() != data_.train_tgt.size() ||
        data_.test_src.size() != data_.test_tgt.size()) {
        throw std::invalid_argument("Seq2SeqModel: malformed dataset");
    }
}

double Seq2SeqModel::normalizer(const std::vector<int>& tgt) const {
    return static_cast<double>(tgt.size()) * static_cast<double>(model_.config().embed_dim);
}

double Seq2SeqModel::train_loss(std::size_t index) {
    return model_.loss(data_.train_src.at(index), data_.train_tgt.at(index)) /
           normalizer(data_.train_tgt.at(index));
}

double Seq2SeqModel::test_loss(std::size_t index) {
    return model_.loss(data_.test_src.at(index), data_.test_tgt.at(index)) /
           normalizer(data_.test_tgt.at(index));
}

double Seq2SeqModel::train_loss_and_gradient(std::size_t index, Eigen::VectorXd& grad) {
    const double norm = normalizer(data_.train_tgt.at(index));
    const double loss = model_.loss_and_gradient(data_.train_src.at(index),
                                                 data_.train_tgt.at(index), grad);
    grad /= norm;
    return loss / norm;
}

std::shared_ptr<FrozenNetReservoir> make_frozen_net(const ExperimentConfig& cfg, bool stateful) {
    FrozenNetConfig fc;
    fc.input_dim = cfg.bottleneck;
    fc.layer_sizes = {200, 100, 200, 100};
    fc.loop_count = cfg.reservoir_loop_count;
    fc.weight_scale = cfg.reservoir_weight_scale;
    fc.stateful = stateful;
    fc.leak = cfg.reservoir_leak;
    fc.feedback_scale = cfg.reservoir_feedback_scale;
    fc.seed = cfg.reservoir_seed;
    return std::make_shared<FrozenNetReservoir>(fc);
}

WdbcModel build_wdbc_model(const ExperimentConfig& cfg) {
    TabularDataset data = load_wdbc(cfg.wdbc_path, cfg.train_fraction, cfg.seed);
    MlpWithReservoirConfig mc;
    mc.input_dim = data.features.cols();
    mc.hidden = {cfg.hidden1, cfg.hidden2};
    mc.bottleneck = cfg.bottleneck;
    mc.output_dim = data.labels.cols();
    mc.init_seed = cfg.seed + 1;
    MlpWithReservoir net(mc, make_frozen_net(cfg, /*stateful=*/false));
    return WdbcModel(std::move(net), std::move(data));
}

Seq2SeqModel build_seq2seq_model(const ExperimentConfig& cfg) {
    Rng data_rng(cfg.seed);
    SequencePairDataset data = make_seq2seq(seq_task_from_string(cfg.seq_task),
                                            static_cast<std::size_t>(cfg.n_train),
                                            static_cast<std::size_t>(cfg.n_test),
                                            cfg.vocab_size,
                                            static_cast<std::size_t>(cfg.seq_len), data_rng);
    TransformerConfig tc;
    tc.vocab_size = cfg.vocab_size;
    tc.embed_dim = cfg.embed_dim;
    tc.n_heads = cfg.n_heads;
    tc.max_seq_len = cfg.max_seq_len;
    tc.reservoir_in = cfg.bottleneck;
    tc.reservoir_out = 100;
    tc.residual = cfg.residual;
    tc.init_seed = cfg.seed + 1;
    ReservoirTransformer net(tc, make_frozen_net(cfg, false), make_frozen_net(cfg, false));
    return Seq2SeqModel(std::move(net), std::move(data));
}

namespace {

TrainingTrace dispatch_training(GradientSampleModel& model, const ExperimentConfig& cfg) {
    const MethodSpec spec = parse_method(cfg.method);
    TrainingTrace trace;
    if (spec.is_pgt) {
        trace = pgt_train(model, cfg.pgt_config(), cfg.epochs);
    } else {
        trace = backprop_train(model, cfg.backprop_config(), cfg.epochs);
    }
    trace.config_snapshot = cfg.snapshot();
    trace.seed = cfg.seed;
    return trace;
}

}  // namespace

TrainingTrace run_train_mlp(const ExperimentConfig& cfg) {
    cfg.validate();
    WdbcModel model = build_wdbc_model(cfg);
    return dispatch_training(model, cfg);
}

TrainingTrace run_train_transformer(const ExperimentConfig& cfg) {
    cfg.validate();
    Seq2SeqModel model = build_seq2seq_model(cfg);
    return dispatch_training(model, cfg);
}

std::vector<CapacityReport> run_characterize(const ExperimentConfig& cfg) {
    cfg.validate();
    std::shared_ptr<Reservoir> reservoir;
    if (cfg.characterize_reservoir == "delay-line") {
        reservoir = std::make_shared<DelayLineReservoir>(cfg.taps);
    } else if (cfg.characterize_reservoir == "frozen-net") {
        reservoir = make_frozen_net(cfg, /*stateful=*/true);
    } else {
        // Deliberately constructed without state so measure_capacity refuses it.
        reservoir = make_frozen_net(cfg, /*stateful=*/false);
    }

    CapacityOptions options;
    options.sequence_length = static_cast<std::size_t>(cfg.sequence_length);
    options.t_max = cfg.t_max;
    options.washout = cfg.washout;
    options.train_fraction = cfg.characterize_train_fraction;
    options.ridge = cfg.ridge;
    options.parity_include_current = cfg.parity_include_current;

    std::vector<CapacityTask> tasks;
    if (cfg.characterize_task == "stm" || cfg.characterize_task == "both") {
        tasks.push_back(CapacityTask::Stm);
    }
    if (cfg.characterize_task == "pc" || cfg.characterize_task == "both") {
        tasks.push_back(CapacityTask::ParityCheck);
    }

    std::vector<CapacityReport> reports;
    for (CapacityTask task : tasks) {
        Rng rng(cfg.seed);  // same drive sequence for every task
        reports.push_back(measure_capacity(*reservoir, task, options, rng));
    }
    return reports;
}

void write_trace_outputs(const TrainingTrace& trace, const ExperimentConfig& cfg) {
    if (cfg.out.empty()) {
        throw std::invalid_argument("write_trace_outputs: experiment.out is empty");
    }
    std::ofstream os(cfg.out);
    if (!os) {
        throw std::runtime_error("write_trace_outputs: cannot open " + cfg.out);
    }
    trace.write_csv(os, /*include_timing=*/cfg.timing);
    if (!cfg.timing) {
        const std::string side = cfg.out + ".timing.csv";
        std::ofstream ts(side);
        if (!ts) {
            throw std::runtime_error("write_trace_outputs: cannot open " + side);
        }
        trace.write_timing_csv(ts);
    }
}

void write_capacity_csv(const std::vector<CapacityReport>& reports, std::ostream& os) {
    bool first = true;
    for (const CapacityReport& report : reports) {
        report.write_csv(os, /*with_header=*/first);
        first = false;
    }
}

namespace {

std::string trace_stem(const std::string& path) {
    const auto slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    const auto dot = name.find_last_of('.');
    if (dot != std::string::npos && dot > 0) {
        name = name.substr(0, dot);
    }
    return name;
}

}  // namespace

void compare_traces(const std::vector<std::string>& paths, std::ostream& os) {
    if (paths.size() < 2) {
        throw std::invalid_argument("compare_traces: need at least two trace files");
    }
    std::vector<TrainingTrace> traces;
    std::vector<std::string> names;
    for (const std::string& path : paths) {
        std::ifstream is(path);
        if (!is) {
            throw std::runtime_error("compare_traces: cannot open " + path);
        }
        traces.push_back(TrainingTrace::read_csv(is));
        if (traces.back().records.empty()) {
            throw std::runtime_error("compare_traces: " + path + " has no epochs");
        }
        names.push_back(trace_stem(path));
    }

    std::size_t common = traces.front().records.size();
    bool truncated = false;
    for (const TrainingTrace& t : traces) {
        if (t.records.size() != common) truncated = true;
        common = std::min(common, t.records.size());
    }
    if (truncated) {
        os << "# note: traces have different lengths; truncated to the common first " << common
           << " epochs\n";
    }

    os << "epoch";
    for (const std::string& name : names) {
        os << ',' << name << "_train," << name << "_test";
    }
    for (std::size_t k = 1; k < names.size(); ++k) {
        os << ",delta_test_" << names[k];
    }
    os << '\n';

    for (std::size_t r = 0; r < common; ++r) {
        const int epoch = traces.front().records[r].epoch;
        for (const TrainingTrace& t : traces) {
            if (t.records[r].epoch != epoch) {
                throw std::runtime_error("compare_traces: epoch numbering differs at row " +
                                         std::to_string(r + 1));
            }
        }
        os << epoch;
        for (const TrainingTrace& t : traces) {
            os << ',' << format_double(t.records[r].train_loss) << ','
               << format_double(t.records[r].test_loss);
        }
        for (std::size_t k = 1; k < traces.size(); ++k) {
            os << ','
               << format_double(traces[k].records[r].test_loss -
                                traces[0].records[r].test_loss);
        }
        os << '\n';
    }
}

}  // namespace pgt
