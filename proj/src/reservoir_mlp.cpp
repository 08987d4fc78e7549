#include "pgt/reservoir_mlp.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace pgt {

void MlpWithReservoirConfig::validate() const {
    if (input_dim <= 0 || bottleneck <= 0 || output_dim <= 0) {
        throw std::invalid_argument("MlpWithReservoirConfig: dimensions must be positive");
    }
    for (Eigen::Index h : hidden) {
        if (h <= 0) {
            throw std::invalid_argument("MlpWithReservoirConfig: hidden widths must be positive");
        }
    }
}

MlpWithReservoir::MlpWithReservoir(const MlpWithReservoirConfig& config,
                                   std::shared_ptr<Reservoir> reservoir)
    : config_(config), reservoir_(std::move(reservoir)) {
    config_.validate();
    if (!reservoir_) {
        throw std::invalid_argument("MlpWithReservoir: reservoir must not be null");
    }
    if (reservoir_->stateful()) {
        throw std::invalid_argument(
            "MlpWithReservoir: classification pipeline requires a stateless reservoir");
    }
    if (reservoir_->input_dim() != config_.bottleneck) {
        throw std::invalid_argument("MlpWithReservoir: reservoir expects input dim " +
                                    std::to_string(reservoir_->input_dim()) +
                                    " but the front net emits " +
                                    std::to_string(config_.bottleneck));
    }

    Rng rng(config_.init_seed);
    std::vector<Eigen::Index> front_dims;
    front_dims.push_back(config_.input_dim);
    front_dims.insert(front_dims.end(), config_.hidden.begin(), config_.hidden.end());
    front_dims.push_back(config_.bottleneck);
    front_ = Mlp::random(front_dims, config_.hidden_activation, config_.bottleneck_activation,
                         rng);
    readout_ = Mlp::random({reservoir_->output_dim(), config_.output_dim}, Activation::Identity,
                           config_.output_activation, rng);

    front_.append_layout(layout_, "front");
    readout_offset_ = layout_.total_size();
    readout_.append_layout(layout_, "readout");
}

Eigen::VectorXd MlpWithReservoir::forward(const Eigen::VectorXd& input) const {
    return readout_.forward(reservoir_->forward(front_.forward(input)));
}

double MlpWithReservoir::loss(const Eigen::VectorXd& input, const Eigen::VectorXd& target) const {
    return mse_loss(forward(input), target);
}

Eigen::Index MlpWithReservoir::parameter_count() const { return layout_.total_size(); }

Eigen::VectorXd MlpWithReservoir::parameters() const {
    Eigen::VectorXd flat(layout_.total_size());
    front_.write_flat(flat, 0);
    readout_.write_flat(flat, readout_offset_);
    return flat;
}

void MlpWithReservoir::set_parameters(const Eigen::VectorXd& theta) {
    if (theta.size() != layout_.total_size()) {
        throw std::invalid_argument("MlpWithReservoir::set_parameters: expected " +
                                    std::to_string(layout_.total_size()) + " values, got " +
                                    std::to_string(theta.size()));
    }
    front_.read_flat(theta, 0);
    readout_.read_flat(theta, readout_offset_);
}

double MlpWithReservoir::loss_and_gradient(const Eigen::VectorXd& input,
                                           const Eigen::VectorXd& target,
                                           Eigen::VectorXd& grad) const {
    Mlp::Cache front_cache;
    const Eigen::VectorXd res_in = front_.forward_cached(input, front_cache);
    const Eigen::VectorXd res_out = reservoir_->forward(res_in);

    Mlp::Cache readout_cache;
    const Eigen::VectorXd y = readout_.forward_cached(res_out, readout_cache);
    const double loss = mse_loss(y, target);

    Mlp::Gradients readout_grads;
    const Eigen::VectorXd g_res_out =
        readout_.backward(readout_cache, mse_loss_gradient(y, target), &readout_grads);
    const Eigen::VectorXd g_res_in = reservoir_->backward(res_in, g_res_out);
    Mlp::Gradients front_grads;
    front_.backward(front_cache, g_res_in, &front_grads);

    grad.resize(layout_.total_size());
    Mlp::write_flat_gradients(front_grads, grad, 0);
    Mlp::write_flat_gradients(readout_grads, grad, readout_offset_);
    return loss;
}

}  // namespace pgt
