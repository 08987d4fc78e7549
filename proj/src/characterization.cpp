#include "pgt/characterization.hpp"

#include "pgt/training_trace.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace pgt {

std::vector<int> generate_binary_sequence(std::size_t n, Rng& rng) {
    std::uniform_int_distribution<int> bit(0, 1);
    std::vector<int> seq(n);
    for (std::size_t i = 0; i < n; ++i) {
        seq[i] = bit(rng);
    }
    return seq;
}

namespace {

void check_window(const std::vector<int>& seq, std::size_t t, std::size_t t_delay,
                  const char* who) {
    if (t >= seq.size()) {
        throw std::invalid_argument(std::string(who) + ": time index out of range");
    }
    if (t_delay > t) {
        throw std::invalid_argument(std::string(who) + ": window reaches before the sequence");
    }
}

}  // namespace

int stm_target(const std::vector<int>& seq, std::size_t t, std::size_t t_delay) {
    check_window(seq, t, t_delay, "stm_target");
    return seq[t - t_delay];
}

int parity_target(const std::vector<int>& seq, std::size_t t, std::size_t t_delay) {
    check_window(seq, t, t_delay, "parity_target");
    int acc = 0;
    for (std::size_t i = t - t_delay; i <= t; ++i) {
        acc ^= seq[i];
    }
    return acc;
}

double squared_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("squared_correlation: size mismatch");
    }
    if (a.size() < 2) {
        throw std::invalid_argument("squared_correlation: need at least two samples");
    }
    const double n = static_cast<double>(a.size());
    const Eigen::ArrayXd da = a.array() - a.mean();
    const Eigen::ArrayXd db = b.array() - b.mean();
    const double var_a = da.square().sum() / n;
    const double var_b = db.square().sum() / n;
    if (!(var_a > 0.0) || !(var_b > 0.0)) {
        return 0.0;
    }
    const double cov = (da * db).sum() / n;
    return (cov * cov) / (var_a * var_b);
}

double RidgeReadout::predict(const Eigen::VectorXd& state) const {
    if (state.size() != weights.size()) {
        throw std::invalid_argument("RidgeReadout::predict: state size mismatch");
    }
    return weights.dot(state) + bias;
}

Eigen::VectorXd RidgeReadout::predict(const Eigen::MatrixXd& states) const {
    if (states.cols() != weights.size()) {
        throw std::invalid_argument("RidgeReadout::predict: state width mismatch");
    }
    return (states * weights).array() + bias;
}

RidgeReadout train_linear_readout(const Eigen::MatrixXd& states, const Eigen::VectorXd& targets,
                                  double ridge) {
    if (states.rows() != targets.size()) {
        throw std::invalid_argument("train_linear_readout: row count mismatch");
    }
    if (states.rows() == 0) {
        throw std::invalid_argument("train_linear_readout: no rows");
    }
    if (ridge < 0.0) {
        throw std::invalid_argument("train_linear_readout: ridge must be non-negative");
    }
    const Eigen::Index d = states.cols();
    const Eigen::Index n = states.rows();

    Eigen::MatrixXd normal(d + 1, d + 1);
    normal.topLeftCorner(d, d) = states.transpose() * states;
    normal.topLeftCorner(d, d).diagonal().array() += ridge;
    normal.topRightCorner(d, 1) = states.colwise().sum().transpose();
    normal.bottomLeftCorner(1, d) = states.colwise().sum();
    normal(d, d) = static_cast<double>(n);

    Eigen::VectorXd rhs(d + 1);
    rhs.head(d) = states.transpose() * targets;
    rhs[d] = targets.sum();

    Eigen::VectorXd sol;
    if (ridge == 0.0) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
        if (!lu.isInvertible()) {
            throw std::runtime_error(
                "train_linear_readout: normal equations are singular at ridge = 0; use a "
                "positive ridge");
        }
        sol = lu.solve(rhs);
    } else {
        sol = normal.ldlt().solve(rhs);
    }
    if (!sol.allFinite()) {
        throw std::runtime_error("train_linear_readout: solver produced non-finite coefficients");
    }

    RidgeReadout readout;
    readout.weights = sol.head(d);
    readout.bias = sol[d];
    return readout;
}

std::string to_string(CapacityTask task) {
    switch (task) {
        case CapacityTask::Stm:
            return "stm";
        case CapacityTask::ParityCheck:
            return "pc";
    }
    throw std::logic_error("to_string: unknown capacity task");
}

void CapacityOptions::validate() const {
    if (t_max < 1) {
        throw std::invalid_argument("CapacityOptions: t_max must be >= 1");
    }
    if (washout < t_max) {
        throw std::invalid_argument(
            "CapacityOptions: washout must be >= t_max so every window fits in the sequence");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("CapacityOptions: train_fraction must lie in (0, 1)");
    }
    if (ridge < 0.0) {
        throw std::invalid_argument("CapacityOptions: ridge must be non-negative");
    }
    const std::size_t rows =
        sequence_length > static_cast<std::size_t>(washout)
            ? sequence_length - static_cast<std::size_t>(washout)
            : 0;
    const auto train_rows = static_cast<std::size_t>(train_fraction * static_cast<double>(rows));
    if (train_rows < 2 || rows - train_rows < 2) {
        throw std::invalid_argument(
            "CapacityOptions: sequence too short for the washout and split");
    }
}

void CapacityReport::write_csv(std::ostream& os, bool with_header) const {
    if (with_header) {
        os << "task,t_delay,cor2\n";
    }
    const std::string name = to_string(task);
    for (std::size_t i = 0; i < cor2.size(); ++i) {
        os << name << ',' << (i + 1) << ',' << format_double(cor2[i]) << '\n';
    }
    os << name << ",TOTAL," << format_double(capacity) << '\n';
}

CapacityReport measure_capacity(Reservoir& reservoir, CapacityTask task,
                                const CapacityOptions& options, Rng& rng) {
    options.validate();
    if (!reservoir.stateful()) {
        throw std::invalid_argument(
            "measure_capacity: memory metrics are meaningless for a stateless reservoir");
    }

    const std::vector<int> seq = generate_binary_sequence(options.sequence_length, rng);
    const auto washout = static_cast<std::size_t>(options.washout);
    const std::size_t rows = options.sequence_length - washout;

    reservoir.reset_state();
    Eigen::MatrixXd states(static_cast<Eigen::Index>(rows), reservoir.output_dim());
    for (std::size_t t = 0; t < options.sequence_length; ++t) {
        const Eigen::VectorXd input =
            Eigen::VectorXd::Constant(reservoir.input_dim(), static_cast<double>(seq[t]));
        const Eigen::VectorXd state = reservoir.forward(input);
        if (t >= washout) {
            states.row(static_cast<Eigen::Index>(t - washout)) = state.transpose();
        }
    }

    const auto train_rows =
        static_cast<std::size_t>(options.train_fraction * static_cast<double>(rows));
    const std::size_t eval_rows = rows - train_rows;
    const Eigen::MatrixXd train_states = states.topRows(static_cast<Eigen::Index>(train_rows));
    const Eigen::MatrixXd eval_states = states.bottomRows(static_cast<Eigen::Index>(eval_rows));

    CapacityReport report;
    report.task = task;
    report.train_rows = train_rows;
    report.eval_rows = eval_rows;

    Eigen::VectorXd train_targets(static_cast<Eigen::Index>(train_rows));
    Eigen::VectorXd eval_targets(static_cast<Eigen::Index>(eval_rows));
    for (int t_delay = 1; t_delay <= options.t_max; ++t_delay) {
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t t = washout + r;
            int target = 0;
            if (task == CapacityTask::Stm) {
                target = stm_target(seq, t, static_cast<std::size_t>(t_delay - 1));
            } else if (options.parity_include_current) {
                target = parity_target(seq, t, static_cast<std::size_t>(t_delay - 1));
            } else {
                target = parity_target(seq, t - 1, static_cast<std::size_t>(t_delay - 1));
            }
            if (r < train_rows) {
                train_targets[static_cast<Eigen::Index>(r)] = target;
            } else {
                eval_targets[static_cast<Eigen::Index>(r - train_rows)] = target;
            }
        }

        double score = 0.0;
        if (!(train_targets.maxCoeff() > train_targets.minCoeff())) {
            report.degenerate_delays.push_back(t_delay);
        } else {
            const RidgeReadout readout =
                train_linear_readout(train_states, train_targets, options.ridge);
            const Eigen::VectorXd preds = readout.predict(eval_states);
            score = squared_correlation(eval_targets, preds);
            if (score == 0.0) {
                report.degenerate_delays.push_back(t_delay);
            }
        }
        if (score > 1.0 + 1e-6) {
            throw std::runtime_error("measure_capacity: Cor^2 exceeded 1 beyond tolerance");
        }
        report.cor2.push_back(score);
        report.capacity += score;
    }
    return report;
}

}  // namespace pgt
