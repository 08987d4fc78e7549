#pragma once

#include "pgt/param_space.hpp"
#include "pgt/reservoir.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace pgt {

/// i.i.d. fair bits (0/1).
std::vector<int> generate_binary_sequence(std::size_t n, Rng& rng);

/// The input seen `t_delay` steps before time t (t_delay = 0 is the current
/// input). Requires t_delay <= t.
int stm_target(const std::vector<int>& seq, std::size_t t, std::size_t t_delay);

/// XOR of the window of inputs from t - t_delay through t inclusive.
int parity_target(const std::vector<int>& seq, std::size_t t, std::size_t t_delay);

/// Squared Pearson correlation with population (1/N) moments; 0 when either
/// side has zero variance.
double squared_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct RidgeReadout {
    Eigen::VectorXd weights;
    double bias = 0.0;

    double predict(const Eigen::VectorXd& state) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& states) const;
};

/// Least squares with L2 penalty on the weights (bias unpenalised). With
/// ridge = 0 a singular normal system throws std::runtime_error.
RidgeReadout train_linear_readout(const Eigen::MatrixXd& states, const Eigen::VectorXd& targets,
                                  double ridge);

enum class CapacityTask { Stm, ParityCheck };

std::string to_string(CapacityTask task);

struct CapacityOptions {
    std::size_t sequence_length = 4000;
    int t_max = 10;
    int washout = 100;
    double train_fraction = 0.6;
    double ridge = 1e-6;
    /// Parity window ends at the current input when true; at the previous
    /// input when false.
    bool parity_include_current = true;

    void validate() const;
};

struct CapacityReport {
    CapacityTask task = CapacityTask::Stm;
    std::vector<double> cor2;  // cor2[i] is the score at delay i + 1
    double capacity = 0.0;
    std::size_t train_rows = 0;
    std::size_t eval_rows = 0;
    /// Delays whose target or prediction had zero variance (scored 0).
    std::vector<int> degenerate_delays;

    /// Rows `task,t_delay,cor2` then `task,TOTAL,capacity`.
    void write_csv(std::ostream& os, bool with_header = true) const;
};

/// Drives the reservoir with a random bit sequence (the bit replicated
/// across the input width), fits one linear readout per delay on the first
/// train_fraction of the post-washout rows, and scores Cor^2 on the rest.
CapacityReport measure_capacity(Reservoir& reservoir, CapacityTask task,
                                const CapacityOptions& options, Rng& rng);

}  // namespace pgt
