#include "pgt/nn_core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace pgt {

Eigen::VectorXd apply_activation(Activation act, const Eigen::VectorXd& pre) {
    switch (act) {
        case Activation::Identity:
            return pre;
        case Activation::Tanh:
            return pre.array().tanh();
        case Activation::Relu:
            return pre.cwiseMax(0.0);
    }
    throw std::logic_error("apply_activation: unknown activation");
}

Eigen::VectorXd activation_derivative(Activation act, const Eigen::VectorXd& pre) {
    switch (act) {
        case Activation::Identity:
            return Eigen::VectorXd::Ones(pre.size());
        case Activation::Tanh: {
            Eigen::ArrayXd t = pre.array().tanh();
            return (1.0 - t.square()).matrix();
        }
        case Activation::Relu:
            return (pre.array() > 0.0).cast<double>().matrix();
    }
    throw std::logic_error("activation_derivative: unknown activation");
}

Eigen::VectorXd DenseLayer::forward(const Eigen::VectorXd& input) const {
    if (input.size() != in_dim()) {
        throw std::invalid_argument("DenseLayer::forward: input size " +
                                    std::to_string(input.size()) + " != " +
                                    std::to_string(in_dim()));
    }
    return apply_activation(activation, weights * input + bias);
}

DenseLayer DenseLayer::random(Eigen::Index out, Eigen::Index in, Activation act, Rng& rng,
                              double scale) {
    if (out <= 0 || in <= 0) {
        throw std::invalid_argument("DenseLayer::random: dimensions must be positive");
    }
    const double bound = scale / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseLayer layer;
    layer.weights = Eigen::MatrixXd::NullaryExpr(out, in, [&] { return dist(rng); });
    layer.bias = Eigen::VectorXd::NullaryExpr(out, [&] { return dist(rng); });
    layer.activation = act;
    return layer;
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) {
        throw std::invalid_argument("Mlp: need at least one layer");
    }
    for (std::size_t i = 1; i < layers_.size(); ++i) {
        if (layers_[i].in_dim() != layers_[i - 1].out_dim()) {
            throw std::invalid_argument("Mlp: layer " + std::to_string(i) + " expects input " +
                                        std::to_string(layers_[i].in_dim()) + " but layer " +
                                        std::to_string(i - 1) + " outputs " +
                                        std::to_string(layers_[i - 1].out_dim()));
        }
    }
}

Mlp Mlp::random(const std::vector<Eigen::Index>& dims, Activation hidden, Activation output,
                Rng& rng, double scale) {
    if (dims.size() < 2) {
        throw std::invalid_argument("Mlp::random: need at least input and output dims");
    }
    std::vector<DenseLayer> layers;
    for (std::size_t i = 1; i < dims.size(); ++i) {
        const Activation act = (i + 1 == dims.size()) ? output : hidden;
        layers.push_back(DenseLayer::random(dims[i], dims[i - 1], act, rng, scale));
    }
    return Mlp(std::move(layers));
}

Eigen::Index Mlp::in_dim() const {
    if (layers_.empty()) throw std::logic_error("Mlp::in_dim: empty network");
    return layers_.front().in_dim();
}

Eigen::Index Mlp::out_dim() const {
    if (layers_.empty()) throw std::logic_error("Mlp::out_dim: empty network");
    return layers_.back().out_dim();
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
    Eigen::VectorXd h = input;
    for (const DenseLayer& layer : layers_) {
        h = layer.forward(h);
    }
    return h;
}

Eigen::VectorXd Mlp::forward_cached(const Eigen::VectorXd& input, Cache& cache) const {
    cache.inputs.clear();
    cache.preacts.clear();
    cache.inputs.reserve(layers_.size());
    cache.preacts.reserve(layers_.size());
    Eigen::VectorXd h = input;
    for (const DenseLayer& layer : layers_) {
        if (h.size() != layer.in_dim()) {
            throw std::invalid_argument("Mlp::forward_cached: dimension mismatch");
        }
        cache.inputs.push_back(h);
        Eigen::VectorXd pre = layer.weights * h + layer.bias;
        cache.preacts.push_back(pre);
        h = apply_activation(layer.activation, pre);
    }
    cache.output = h;
    return h;
}

Eigen::VectorXd Mlp::backward(const Cache& cache, const Eigen::VectorXd& grad_output,
                              Gradients* grads) const {
    if (cache.inputs.size() != layers_.size() || cache.preacts.size() != layers_.size()) {
        throw std::invalid_argument("Mlp::backward: cache does not match this network");
    }
    if (grads != nullptr) {
        grads->weights.assign(layers_.size(), Eigen::MatrixXd());
        grads->biases.assign(layers_.size(), Eigen::VectorXd());
    }
    Eigen::VectorXd g = grad_output;
    for (std::size_t k = layers_.size(); k-- > 0;) {
        const DenseLayer& layer = layers_[k];
        if (g.size() != layer.out_dim()) {
            throw std::invalid_argument("Mlp::backward: gradient size mismatch at layer " +
                                        std::to_string(k));
        }
        Eigen::VectorXd gpre =
            g.cwiseProduct(activation_derivative(layer.activation, cache.preacts[k]));
        if (grads != nullptr) {
            grads->weights[k] = gpre * cache.inputs[k].transpose();
            grads->biases[k] = gpre;
        }
        g = layer.weights.transpose() * gpre;
    }
    return g;
}

Eigen::Index Mlp::parameter_count() const {
    Eigen::Index n = 0;
    for (const DenseLayer& layer : layers_) {
        n += layer.weights.size() + layer.bias.size();
    }
    return n;
}

void Mlp::append_layout(ParameterLayout& layout, const std::string& prefix) const {
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        const std::string base = prefix + ".layer" + std::to_string(k);
        layout.add(base + ".weights", layers_[k].out_dim(), layers_[k].in_dim());
        layout.add(base + ".bias", layers_[k].out_dim());
    }
}

void Mlp::write_flat(Eigen::Ref<Eigen::VectorXd> flat, Eigen::Index offset) const {
    for (const DenseLayer& layer : layers_) {
        const Eigen::Index wn = layer.weights.size();
        flat.segment(offset, wn) = Eigen::Map<const Eigen::VectorXd>(layer.weights.data(), wn);
        offset += wn;
        flat.segment(offset, layer.bias.size()) = layer.bias;
        offset += layer.bias.size();
    }
}

void Mlp::read_flat(const Eigen::Ref<const Eigen::VectorXd>& flat, Eigen::Index offset) {
    for (DenseLayer& layer : layers_) {
        const Eigen::Index wn = layer.weights.size();
        Eigen::Map<Eigen::VectorXd>(layer.weights.data(), wn) = flat.segment(offset, wn);
        offset += wn;
        layer.bias = flat.segment(offset, layer.bias.size());
        offset += layer.bias.size();
    }
}

void Mlp::write_flat_gradients(const Gradients& grads, Eigen::Ref<Eigen::VectorXd> flat,
                               Eigen::Index offset) {
    if (grads.weights.size() != grads.biases.size()) {
        throw std::invalid_argument("write_flat_gradients: malformed gradients");
    }
    for (std::size_t k = 0; k < grads.weights.size(); ++k) {
        const Eigen::Index wn = grads.weights[k].size();
        flat.segment(offset, wn) = Eigen::Map<const Eigen::VectorXd>(grads.weights[k].data(), wn);
        offset += wn;
        flat.segment(offset, grads.biases[k].size()) = grads.biases[k];
        offset += grads.biases[k].size();
    }
}

double mse_loss(const Eigen::VectorXd& y, const Eigen::VectorXd& y_target) {
    if (y.size() != y_target.size()) {
        throw std::invalid_argument("mse_loss: size mismatch (" + std::to_string(y.size()) +
                                    " vs " + std::to_string(y_target.size()) + ")");
    }
    return (y - y_target).squaredNorm();
}

Eigen::VectorXd mse_loss_gradient(const Eigen::VectorXd& y, const Eigen::VectorXd& y_target) {
    if (y.size() != y_target.size()) {
        throw std::invalid_argument("mse_loss_gradient: size mismatch");
    }
    return 2.0 * (y - y_target);
}

TrainingTrace backprop_train(GradientSampleModel& model, const BackpropConfig& config,
                             int epochs) {
    if (epochs <= 0) {
        throw std::invalid_argument("backprop_train: epochs must be positive");
    }
    if (!(config.learning_rate > 0.0)) {
        throw std::invalid_argument("backprop_train: learning_rate must be positive");
    }
    const std::size_t n_train = model.train_size();
    if (n_train == 0) {
        throw std::invalid_argument("backprop_train: empty training set");
    }

    Rng rng(config.seed);
    Eigen::VectorXd theta = model.parameters();
    OptimizerState opt = OptimizerState::make(config.optimizer, theta.size());
    Eigen::VectorXd grad(theta.size());

    TrainingTrace trace;
    trace.seed = config.seed;

    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 1; epoch <= epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), rng);
        double train_sum = 0.0;
        for (std::size_t index : order) {
            model.set_parameters(theta);
            const double loss = model.train_loss_and_gradient(index, grad);
            if (!std::isfinite(loss)) {
                throw std::runtime_error("backprop_train: non-finite loss at epoch " +
                                         std::to_string(epoch));
            }
            train_sum += loss;
            if (config.optimizer == OptimizerKind::Sgd) {
                theta = sgd_step(theta, grad, config.learning_rate);
                opt.t += 1;
            } else {
                theta = adam_step(theta, grad, opt, config.learning_rate, config.adam_beta1,
                                  config.adam_beta2, config.adam_epsilon);
            }
        }
        model.set_parameters(theta);
        double test_sum = 0.0;
        for (std::size_t i = 0; i < model.test_size(); ++i) {
            test_sum += model.test_loss(i);
        }
        const double test_mean =
            model.test_size() == 0 ? 0.0 : test_sum / static_cast<double>(model.test_size());
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        trace.add(epoch, train_sum / static_cast<double>(n_train), test_mean, dt.count());
    }
    return trace;
}

}  // namespace pgt
