#include "pgt/reservoir.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>

namespace pgt {

namespace {

DenseLayer random_layer_scaled(Eigen::Index out, Eigen::Index in, Activation act, Rng& rng,
                               double weight_scale, double bias_scale) {
    const double fan = std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    DenseLayer layer;
    layer.weights =
        Eigen::MatrixXd::NullaryExpr(out, in, [&] { return unit(rng) * weight_scale / fan; });
    layer.bias = Eigen::VectorXd::NullaryExpr(out, [&] { return unit(rng) * bias_scale / fan; });
    layer.activation = act;
    return layer;
}

void fnv1a_doubles(std::uint64_t& hash, const double* data, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &data[i], sizeof(bits));
        for (int b = 0; b < 8; ++b) {
            hash ^= (bits >> (8 * b)) & 0xffu;
            hash *= 0x100000001b3ull;
        }
    }
}

}  // namespace

Eigen::VectorXd Reservoir::backward(const Eigen::VectorXd& /*input*/,
                                    const Eigen::VectorXd& /*grad_output*/) {
    throw std::logic_error(
        "Reservoir::backward: gradient unavailable; this reservoir is a black box");
}

void FrozenNetConfig::validate() const {
    if (input_dim <= 0) {
        throw std::invalid_argument("FrozenNetConfig: input_dim must be positive");
    }
    if (layer_sizes.empty()) {
        throw std::invalid_argument("FrozenNetConfig: layer_sizes must be non-empty");
    }
    for (Eigen::Index w : layer_sizes) {
        if (w <= 0) {
            throw std::invalid_argument("FrozenNetConfig: layer widths must be positive");
        }
    }
    if (loop_count < 1) {
        throw std::invalid_argument("FrozenNetConfig: loop_count must be >= 1");
    }
    if (weight_scale < 0.0 || bias_scale < 0.0 || adapter_scale < 0.0) {
        throw std::invalid_argument("FrozenNetConfig: scales must be non-negative");
    }
    if (stateful) {
        if (!(leak > 0.0 && leak < 1.0)) {
            throw std::invalid_argument("FrozenNetConfig: leak must lie in (0, 1)");
        }
        if (feedback_scale < 0.0) {
            throw std::invalid_argument("FrozenNetConfig: feedback_scale must be non-negative");
        }
    }
}

FrozenNetReservoir::FrozenNetReservoir(const FrozenNetConfig& config) : config_(config) {
    config_.validate();
    width_ = config_.layer_sizes.back();
    Rng rng(config_.seed);

    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double adapter_bound =
        config_.adapter_scale / std::sqrt(static_cast<double>(config_.input_dim));
    adapter_ = Eigen::MatrixXd::NullaryExpr(width_, config_.input_dim,
                                            [&] { return unit(rng) * adapter_bound; });

    std::vector<DenseLayer> layers;
    Eigen::Index in = width_;
    for (Eigen::Index out : config_.layer_sizes) {
        layers.push_back(random_layer_scaled(out, in, config_.activation, rng,
                                             config_.weight_scale, config_.bias_scale));
        in = out;
    }
    stack_ = Mlp(std::move(layers));

    if (config_.stateful && config_.feedback_scale > 0.0) {
        Eigen::MatrixXd raw =
            Eigen::MatrixXd::NullaryExpr(width_, width_, [&] { return unit(rng); });
        const double radius = Eigen::EigenSolver<Eigen::MatrixXd>(raw, /*computeEigenvectors=*/false)
                                  .eigenvalues()
                                  .cwiseAbs()
                                  .maxCoeff();
        if (!(radius > 0.0)) {
            throw std::runtime_error("FrozenNetReservoir: degenerate feedback matrix");
        }
        feedback_ = raw * (config_.feedback_scale / radius);
    } else {
        feedback_ = Eigen::MatrixXd::Zero(width_, width_);
    }

    if (config_.stateful) {
        state_ = Eigen::VectorXd::Zero(width_);
    }
}

Eigen::VectorXd FrozenNetReservoir::run_net(const Eigen::VectorXd& stack_input) const {
    Eigen::VectorXd h = stack_input;
    for (int k = 0; k < config_.loop_count; ++k) {
        h = stack_.forward(h);
    }
    return h;
}

Eigen::VectorXd FrozenNetReservoir::forward(const Eigen::VectorXd& input) {
    if (input.size() != config_.input_dim) {
        throw std::invalid_argument("FrozenNetReservoir::forward: input size " +
                                    std::to_string(input.size()) + " != " +
                                    std::to_string(config_.input_dim));
    }
    if (!config_.stateful) {
        return run_net(adapter_ * input);
    }
    state_ = config_.leak * state_ + run_net(adapter_ * input + feedback_ * state_);
    return state_;
}

Eigen::VectorXd FrozenNetReservoir::backward(const Eigen::VectorXd& input,
                                             const Eigen::VectorXd& grad_output) {
    if (config_.stateful) {
        throw std::logic_error(
            "FrozenNetReservoir::backward: gradient unavailable in stateful mode");
    }
    if (input.size() != config_.input_dim || grad_output.size() != width_) {
        throw std::invalid_argument("FrozenNetReservoir::backward: dimension mismatch");
    }
    std::vector<Mlp::Cache> caches(static_cast<std::size_t>(config_.loop_count));
    Eigen::VectorXd h = adapter_ * input;
    for (auto& cache : caches) {
        h = stack_.forward_cached(h, cache);
    }
    Eigen::VectorXd g = grad_output;
    for (std::size_t k = caches.size(); k-- > 0;) {
        g = stack_.backward(caches[k], g, nullptr);
    }
    return adapter_.transpose() * g;
}

void FrozenNetReservoir::reset_state() {
    if (config_.stateful) {
        state_.setZero();
    }
}

std::uint64_t FrozenNetReservoir::parameter_checksum() const {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    fnv1a_doubles(hash, adapter_.data(), adapter_.size());
    for (const DenseLayer& layer : stack_.layers()) {
        fnv1a_doubles(hash, layer.weights.data(), layer.weights.size());
        fnv1a_doubles(hash, layer.bias.data(), layer.bias.size());
    }
    fnv1a_doubles(hash, feedback_.data(), feedback_.size());
    return hash;
}

DelayLineReservoir::DelayLineReservoir(Eigen::Index taps) : taps_(taps) {
    if (taps <= 0) {
        throw std::invalid_argument("DelayLineReservoir: taps must be positive");
    }
}

Eigen::VectorXd DelayLineReservoir::forward(const Eigen::VectorXd& input) {
    if (input.size() != 1) {
        throw std::invalid_argument("DelayLineReservoir::forward: expected scalar input");
    }
    history_.push_front(input[0]);
    if (static_cast<Eigen::Index>(history_.size()) > taps_) {
        history_.pop_back();
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(taps_);
    for (std::size_t j = 0; j < history_.size(); ++j) {
        out[static_cast<Eigen::Index>(j)] = history_[j];
    }
    return out;
}

void DelayLineReservoir::reset_state() { history_.clear(); }

}  // namespace pgt
