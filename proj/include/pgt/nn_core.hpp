#pragma once

#include "pgt/param_space.hpp"
#include "pgt/pgt_engine.hpp"
#include "pgt/training_trace.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace pgt {

enum class Activation { Identity, Tanh, Relu };

Eigen::VectorXd apply_activation(Activation act, const Eigen::VectorXd& pre);
Eigen::VectorXd activation_derivative(Activation act, const Eigen::VectorXd& pre);

/// Affine map plus pointwise activation. weights is out x in.
struct DenseLayer {
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;
    Activation activation = Activation::Identity;

    Eigen::Index in_dim() const { return weights.cols(); }
    Eigen::Index out_dim() const { return weights.rows(); }
    Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

    /// Uniform init in [-scale/sqrt(fan_in), +scale/sqrt(fan_in)] for weights
    /// and bias.
    static DenseLayer random(Eigen::Index out, Eigen::Index in, Activation act, Rng& rng,
                             double scale = 1.0);
};

/// Plain dense stack with manual gradients.
class Mlp {
  public:
    Mlp() = default;
    explicit Mlp(std::vector<DenseLayer> layers);

    /// dims = {in, h1, ..., out}; hidden layers get `hidden`, the last `output`.
    static Mlp random(const std::vector<Eigen::Index>& dims, Activation hidden, Activation output,
                      Rng& rng, double scale = 1.0);

    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }
    Eigen::Index in_dim() const;
    Eigen::Index out_dim() const;

    Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

    struct Cache {
        std::vector<Eigen::VectorXd> inputs;   // input to each layer
        std::vector<Eigen::VectorXd> preacts;  // W x + b per layer
        Eigen::VectorXd output;
    };
    Eigen::VectorXd forward_cached(const Eigen::VectorXd& input, Cache& cache) const;

    struct Gradients {
        std::vector<Eigen::MatrixXd> weights;
        std::vector<Eigen::VectorXd> biases;
    };
    /// Reverse pass: returns dL/dinput; fills per-layer parameter gradients
    /// when grads is non-null.
    Eigen::VectorXd backward(const Cache& cache, const Eigen::VectorXd& grad_output,
                             Gradients* grads) const;

    // Flat parameter plumbing: per layer, weights (column-major) then bias.
    Eigen::Index parameter_count() const;
    void append_layout(ParameterLayout& layout, const std::string& prefix) const;
    void write_flat(Eigen::Ref<Eigen::VectorXd> flat, Eigen::Index offset) const;
    void read_flat(const Eigen::Ref<const Eigen::VectorXd>& flat, Eigen::Index offset);
    static void write_flat_gradients(const Gradients& grads, Eigen::Ref<Eigen::VectorXd> flat,
                                     Eigen::Index offset);

  private:
    std::vector<DenseLayer> layers_;
};

/// Sum of squared differences (not the mean).
double mse_loss(const Eigen::VectorXd& y, const Eigen::VectorXd& y_target);

/// dL/dy of mse_loss: 2 (y - y_target).
Eigen::VectorXd mse_loss_gradient(const Eigen::VectorXd& y, const Eigen::VectorXd& y_target);

/// A SampleLossModel that can also produce exact analytic gradients, for
/// backpropagation baselines. Models wrapping an opaque reservoir throw
/// "gradient unavailable" from train_loss_and_gradient.
class GradientSampleModel : public SampleLossModel {
  public:
    /// Loss of train sample `index` at the current parameters, plus dL/dtheta.
    virtual double train_loss_and_gradient(std::size_t index, Eigen::VectorXd& grad) = 0;
};

struct BackpropConfig {
    OptimizerKind optimizer = OptimizerKind::Sgd;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 1;
};

/// Per-sample gradient-descent loop recorded identically to pgt_train:
/// per-epoch mean train loss, test loss at the epoch-end parameters.
TrainingTrace backprop_train(GradientSampleModel& model, const BackpropConfig& config, int epochs);

}  // namespace pgt
