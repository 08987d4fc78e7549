#include "pgt/pgt_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pgt {

OptimizerState OptimizerState::make(OptimizerKind kind, Eigen::Index len) {
    OptimizerState state;
    state.kind = kind;
    if (kind == OptimizerKind::Adam) {
        state.m = Eigen::VectorXd::Zero(len);
        state.v = Eigen::VectorXd::Zero(len);
    }
    state.t = 0;
    return state;
}

GradientEstimate estimate_gradient(const LossOracle& loss, const Eigen::VectorXd& theta,
                                   const PerturbationMatrix& pm, double delta) {
    const Eigen::VectorXd theta_plus = apply_perturbation(theta, pm, delta, +1);
    const Eigen::VectorXd theta_minus = apply_perturbation(theta, pm, delta, -1);

    GradientEstimate est;
    est.loss_plus = loss(theta_plus);
    if (!std::isfinite(est.loss_plus)) {
        throw std::runtime_error("estimate_gradient: non-finite loss on the +delta pass");
    }
    est.loss_minus = loss(theta_minus);
    if (!std::isfinite(est.loss_minus)) {
        throw std::runtime_error("estimate_gradient: non-finite loss on the -delta pass");
    }
    est.grad = (est.loss_plus - est.loss_minus) / (2.0 * delta);
    est.update = build_update(est.grad, pm);
    return est;
}

Eigen::VectorXd build_update(double grad, const PerturbationMatrix& pm) {
    if (pm.counts.size() != pm.entries.size()) {
        throw std::invalid_argument("build_update: counts/entries length mismatch");
    }
    Eigen::VectorXd update = Eigen::VectorXd::Zero(pm.entries.size());
    for (Eigen::Index i = 0; i < pm.entries.size(); ++i) {
        if (pm.counts[i] > 0) {
            update[i] = grad * static_cast<double>(pm.entries[i]) / pm.counts[i];
        }
    }
    return update;
}

Eigen::VectorXd sgd_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& update,
                         double learning_rate) {
    if (theta.size() != update.size()) {
        throw std::invalid_argument("sgd_step: parameter/update length mismatch");
    }
    return theta - learning_rate * update;
}

Eigen::VectorXd adam_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& update,
                          OptimizerState& state, double learning_rate, double beta1, double beta2,
                          double epsilon) {
    if (theta.size() != update.size()) {
        throw std::invalid_argument("adam_step: parameter/update length mismatch");
    }
    if (state.m.size() != theta.size() || state.v.size() != theta.size()) {
        throw std::invalid_argument("adam_step: optimizer state length mismatch");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));

    Eigen::VectorXd out = theta;
    for (Eigen::Index i = 0; i < update.size(); ++i) {
        const double g = update[i];
        if (g == 0.0) continue;  // unprobed coordinate, no information
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        if (!std::isfinite(m_hat) || !std::isfinite(v_hat)) {
            throw std::runtime_error("adam_step: non-finite moment at coordinate " +
                                     std::to_string(i));
        }
        out[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon);
    }
    return out;
}

Eigen::VectorXd optimizer_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& update,
                               OptimizerState& state, const PGTConfig& config) {
    if (state.kind == OptimizerKind::Adam) {
        return adam_step(theta, update, state, config.learning_rate, config.adam_beta1,
                         config.adam_beta2, config.adam_epsilon);
    }
    state.t += 1;
    return sgd_step(theta, update, config.learning_rate);
}

TrainingTrace pgt_train(SampleLossModel& model, const PGTConfig& config, int epochs) {
    config.validate();
    if (epochs <= 0) throw std::invalid_argument("pgt_train: epochs must be > 0");
    const std::size_t n_train = model.train_size();
    if (n_train == 0) throw std::invalid_argument("pgt_train: empty training set");

    Rng rng(config.seed);
    Eigen::VectorXd theta = model.parameters();
    const Eigen::Index len = theta.size();
    OptimizerState state = OptimizerState::make(config.optimizer, len);

    TrainingTrace trace;
    trace.seed = config.seed;

    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), std::size_t{0});

    PerturbationMatrix pm;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), rng);
        if (config.resample == ResamplePolicy::PerEpoch) {
            pm = sample_perturbation(len, config, rng);
        }

        double train_sum = 0.0;
        for (std::size_t index : order) {
            if (config.resample == ResamplePolicy::PerSample) {
                pm = sample_perturbation(len, config, rng);
            }
            const LossOracle oracle = [&](const Eigen::VectorXd& candidate) {
                model.set_parameters(candidate);
                return model.train_loss(index);
            };
            const GradientEstimate est = estimate_gradient(oracle, theta, pm, config.delta);
            train_sum += 0.5 * (est.loss_plus + est.loss_minus);
            theta = optimizer_step(theta, est.update, state, config);
        }

        model.set_parameters(theta);
        double test_sum = 0.0;
        const std::size_t n_test = model.test_size();
        for (std::size_t j = 0; j < n_test; ++j) test_sum += model.test_loss(j);
        const double test_mean = n_test > 0 ? test_sum / static_cast<double>(n_test) : 0.0;

        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        trace.add(epoch + 1, train_sum / static_cast<double>(n_train), test_mean, seconds);
    }
    return trace;
}

}  // namespace pgt
