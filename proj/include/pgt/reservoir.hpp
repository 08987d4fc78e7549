#pragma once

#include "pgt/nn_core.hpp"
#include "pgt/param_space.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <deque>
#include <memory>
#include <vector>

namespace pgt {

/// Fixed-function compute block. Consumers may only drive inputs and read
/// outputs; internal parameters are never trainable and never appear in a
/// ParameterVector.
class Reservoir {
  public:
    virtual ~Reservoir() = default;

    virtual Eigen::Index input_dim() const = 0;
    virtual Eigen::Index output_dim() const = 0;
    virtual bool stateful() const = 0;

    /// True when backward() is implemented (simulated blocks only). A
    /// physical device would return false and backpropagation through it is
    /// impossible.
    virtual bool gradient_available() const { return false; }

    virtual Eigen::VectorXd forward(const Eigen::VectorXd& input) = 0;

    /// Vector-Jacobian product d(output)/d(input)^T * grad_output, evaluated
    /// at `input`. Only valid for stateless reservoirs with
    /// gradient_available().
    virtual Eigen::VectorXd backward(const Eigen::VectorXd& input,
                                     const Eigen::VectorXd& grad_output);

    virtual void reset_state() {}
};

struct FrozenNetConfig {
    Eigen::Index input_dim = 5;
    /// Widths of the frozen stack; the stack maps layer_sizes.back() ->
    /// layer_sizes.back() so it can be applied loop_count times. The last
    /// width is the state/output width.
    std::vector<Eigen::Index> layer_sizes = {200, 100, 200, 100};
    int loop_count = 2;
    Activation activation = Activation::Tanh;
    double weight_scale = 1.0;
    double bias_scale = 1.0;
    /// Scale of the linear input adapter (input_dim -> stack width). Zero
    /// makes the reservoir ignore its input entirely.
    double adapter_scale = 1.0;
    bool stateful = false;
    /// Leak rate lambda in stateful mode: state <- lambda*state + net(...).
    double leak = 0.5;
    /// Spectral radius of the state-feedback matrix; 0 disables feedback.
    double feedback_scale = 0.9;
    std::uint64_t seed = 7;

    void validate() const;
};

/// Randomly initialised dense net, frozen at construction. Stateless mode
/// computes net(adapter(x)) where net is the stack applied loop_count times.
/// Stateful mode keeps a state vector updated as
///   state <- leak * state + net(adapter(x) + feedback * state).
class FrozenNetReservoir : public Reservoir {
  public:
    explicit FrozenNetReservoir(const FrozenNetConfig& config);

    Eigen::Index input_dim() const override { return config_.input_dim; }
    Eigen::Index output_dim() const override { return width_; }
    bool stateful() const override { return config_.stateful; }
    bool gradient_available() const override { return !config_.stateful; }

    Eigen::VectorXd forward(const Eigen::VectorXd& input) override;
    Eigen::VectorXd backward(const Eigen::VectorXd& input,
                             const Eigen::VectorXd& grad_output) override;
    void reset_state() override;

    const Eigen::VectorXd& state() const { return state_; }

    /// FNV-1a hash over every frozen coefficient, for immutability checks.
    std::uint64_t parameter_checksum() const;

  private:
    Eigen::VectorXd run_net(const Eigen::VectorXd& stack_input) const;

    FrozenNetConfig config_;
    Eigen::Index width_ = 0;
    Eigen::MatrixXd adapter_;   // width x input_dim, no bias
    Mlp stack_;                 // width -> ... -> width
    Eigen::MatrixXd feedback_;  // width x width, scaled to spectral radius
    Eigen::VectorXd state_;
};

/// Shift register over a scalar input stream: output[j] is the input seen j
/// steps ago (output[0] is the current input). Positions older than the
/// oldest input are zero.
class DelayLineReservoir : public Reservoir {
  public:
    explicit DelayLineReservoir(Eigen::Index taps);

    Eigen::Index input_dim() const override { return 1; }
    Eigen::Index output_dim() const override { return taps_; }
    bool stateful() const override { return true; }

    Eigen::VectorXd forward(const Eigen::VectorXd& input) override;
    void reset_state() override;

  private:
    Eigen::Index taps_;
    std::deque<double> history_;  // most recent first
};

}  // namespace pgt
