#pragma once

#include "pgt/param_space.hpp"
#include "pgt/training_trace.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>

namespace pgt {

/// Loss as a function of the flat parameter vector. A single evaluation is a
/// full forward pass of the model on one sample.
using LossOracle = std::function<double(const Eigen::VectorXd&)>;

/// Directional loss slope along one perturbation plus the parameter update
/// distilled from it. update[i] is zero wherever the perturbation entry is
/// zero and grad * sign(entry) elsewhere.
struct GradientEstimate {
    double grad = 0.0;
    Eigen::VectorXd update;
    double loss_plus = 0.0;
    double loss_minus = 0.0;
};

/// Optimizer state for the update step. Adam moments are touched only on
/// coordinates actually probed by a perturbation; unprobed coordinates carry
/// no information and are left alone.
struct OptimizerState {
    OptimizerKind kind = OptimizerKind::Sgd;
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    long t = 0;

    static OptimizerState make(OptimizerKind kind, Eigen::Index len);
};

/// Central-difference slope from two forward passes:
///   grad = (L(theta + delta*PM) - L(theta - delta*PM)) / (2*delta).
/// Invokes the oracle exactly twice. Throws std::runtime_error naming the
/// failing pass if either loss is non-finite.
GradientEstimate estimate_gradient(const LossOracle& loss, const Eigen::VectorXd& theta,
                                   const PerturbationMatrix& pm, double delta);

/// grad * entries[i] / counts[i] where counts[i] > 0, exactly 0 elsewhere.
Eigen::VectorXd build_update(double grad, const PerturbationMatrix& pm);

/// theta - learning_rate * update.
Eigen::VectorXd sgd_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& update,
                         double learning_rate);

/// Adam with bias correction applied to the PGT update as if it were a
/// gradient. Moments and parameters move only where update != 0; the step
/// counter always advances. Returns the new parameters and mutates state.
Eigen::VectorXd adam_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& update,
                          OptimizerState& state, double learning_rate, double beta1 = 0.9,
                          double beta2 = 0.999, double epsilon = 1e-8);

/// Applies the configured optimizer (SGD or Adam) to one update vector.
Eigen::VectorXd optimizer_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& update,
                               OptimizerState& state, const PGTConfig& config);

/// A model trainable one sample at a time through a loss-producing forward
/// pass. The flat parameter vector excludes reservoir internals. Both loss
/// methods leave the stored parameters untouched apart from set_parameters.
class SampleLossModel {
  public:
    virtual ~SampleLossModel() = default;

    virtual Eigen::Index parameter_count() const = 0;
    virtual Eigen::VectorXd parameters() const = 0;
    virtual void set_parameters(const Eigen::VectorXd& theta) = 0;

    virtual std::size_t train_size() const = 0;
    virtual std::size_t test_size() const = 0;

    /// Forward pass producing the loss for one training sample.
    virtual double train_loss(std::size_t index) = 0;
    /// Forward pass producing the loss for one held-out sample.
    virtual double test_loss(std::size_t index) = 0;
};

/// Runs the perturbative training loop: per sample, draw a perturbation (or
/// reuse the epoch's, per the resample policy), run the +/- passes, estimate
/// the slope, and apply the optimizer step. Exactly two forward passes per
/// training sample, no backward passes. The recorded train loss is the mean
/// of the two perturbed-pass losses; the test loss is evaluated once per
/// epoch at the unperturbed parameters.
TrainingTrace pgt_train(SampleLossModel& model, const PGTConfig& config, int epochs);

}  // namespace pgt
