#pragma once

#include "pgt/nn_core.hpp"
#include "pgt/param_space.hpp"
#include "pgt/reservoir.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <vector>

namespace pgt {

struct MlpWithReservoirConfig {
    Eigen::Index input_dim = 30;
    std::vector<Eigen::Index> hidden = {200, 200};
    /// Width of the front net's output, which drives the reservoir.
    Eigen::Index bottleneck = 5;
    Eigen::Index output_dim = 2;
    Activation hidden_activation = Activation::Tanh;
    Activation bottleneck_activation = Activation::Tanh;
    Activation output_activation = Activation::Identity;
    std::uint64_t init_seed = 1;

    void validate() const;
};

/// Trainable front net -> fixed reservoir -> trainable linear readout.
/// The flat parameter vector contains the front net and readout only; the
/// reservoir's coefficients are unreachable through this class.
class MlpWithReservoir {
  public:
    MlpWithReservoir(const MlpWithReservoirConfig& config, std::shared_ptr<Reservoir> reservoir);

    Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
    double loss(const Eigen::VectorXd& input, const Eigen::VectorXd& target) const;

    Eigen::Index parameter_count() const;
    const ParameterLayout& layout() const { return layout_; }
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& theta);

    /// Exact dL/dtheta via the chain rule. Requires the reservoir to expose
    /// gradients; throws std::logic_error otherwise.
    double loss_and_gradient(const Eigen::VectorXd& input, const Eigen::VectorXd& target,
                             Eigen::VectorXd& grad) const;

    const Reservoir& reservoir() const { return *reservoir_; }
    const Mlp& front() const { return front_; }
    const Mlp& readout() const { return readout_; }

  private:
    MlpWithReservoirConfig config_;
    std::shared_ptr<Reservoir> reservoir_;
    Mlp front_;
    Mlp readout_;
    ParameterLayout layout_;
    Eigen::Index readout_offset_ = 0;
};

}  // namespace pgt
