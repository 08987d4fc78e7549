#include "pgt/nn_core.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace pgt;

TEST_CASE("activations and their derivatives") {
    Eigen::VectorXd pre(3);
    pre << -1.0, 0.0, 2.0;

    const Eigen::VectorXd ident = apply_activation(Activation::Identity, pre);
    CHECK(ident.isApprox(pre));
    const Eigen::VectorXd d_ident = activation_derivative(Activation::Identity, pre);
    CHECK(d_ident.isApproxToConstant(1.0));

    const Eigen::VectorXd tanh_v = apply_activation(Activation::Tanh, pre);
    CHECK(tanh_v[0] == doctest::Approx(std::tanh(-1.0)));
    CHECK(tanh_v[1] == 0.0);
    CHECK(tanh_v[2] == doctest::Approx(std::tanh(2.0)));
    const Eigen::VectorXd d_tanh = activation_derivative(Activation::Tanh, pre);
    for (int i = 0; i < 3; ++i) {
        const double t = std::tanh(pre[i]);
        CHECK(d_tanh[i] == doctest::Approx(1.0 - t * t));
    }

    const Eigen::VectorXd relu = apply_activation(Activation::Relu, pre);
    CHECK(relu[0] == 0.0);
    CHECK(relu[1] == 0.0);
    CHECK(relu[2] == 2.0);
    const Eigen::VectorXd d_relu = activation_derivative(Activation::Relu, pre);
    CHECK(d_relu[0] == 0.0);
    CHECK(d_relu[2] == 1.0);
}

TEST_CASE("dense layer computes an affine map") {
    DenseLayer layer;
    layer.weights.resize(2, 2);
    layer.weights << 1.0, 2.0, 3.0, 4.0;
    layer.bias.resize(2);
    layer.bias << 0.5, -0.5;
    layer.activation = Activation::Identity;

    Eigen::VectorXd x(2);
    x << 1.0, 1.0;
    const Eigen::VectorXd y = layer.forward(x);
    CHECK(y[0] == doctest::Approx(3.5));
    CHECK(y[1] == doctest::Approx(6.5));

    layer.activation = Activation::Tanh;
    const Eigen::VectorXd yt = layer.forward(x);
    CHECK(yt[0] == doctest::Approx(std::tanh(3.5)));
}

TEST_CASE("random layer respects the fan-in scale bound") {
    Rng rng(3);
    const DenseLayer layer = DenseLayer::random(8, 16, Activation::Tanh, rng, 1.0);
    CHECK(layer.weights.rows() == 8);
    CHECK(layer.weights.cols() == 16);
    const double bound = 1.0 / std::sqrt(16.0);
    CHECK(layer.weights.cwiseAbs().maxCoeff() <= bound);
    CHECK(layer.bias.cwiseAbs().maxCoeff() <= bound);
    // Not degenerate: values actually spread out.
    CHECK(layer.weights.cwiseAbs().maxCoeff() > 0.1 * bound);
}

TEST_CASE("sum-of-squares loss and its gradient") {
    Eigen::VectorXd y(2), t(2);
    y << 1.0, 2.0;
    t << 0.0, 1.0;
    CHECK(mse_loss(y, t) == doctest::Approx(2.0));

    t << 1.0, 2.5;
    CHECK(mse_loss(y, t) == doctest::Approx(0.25));

    const Eigen::VectorXd g = mse_loss_gradient(y, t);
    CHECK(g[0] == doctest::Approx(0.0));
    CHECK(g[1] == doctest::Approx(-1.0));
}

namespace {

double finite_difference_loss(Mlp& mlp, const Eigen::VectorXd& x, const Eigen::VectorXd& target) {
    return mse_loss(mlp.forward(x), target);
}

}  // namespace

TEST_CASE("manual backward matches central finite differences") {
    Rng rng(7);
    Mlp mlp = Mlp::random({3, 4, 2}, Activation::Tanh, Activation::Identity, rng, 1.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXd x(3), target(2);
    for (int i = 0; i < 3; ++i) x[i] = unit(rng);
    for (int i = 0; i < 2; ++i) target[i] = unit(rng);

    Mlp::Cache cache;
    mlp.forward_cached(x, cache);
    Mlp::Gradients grads;
    const Eigen::VectorXd grad_in =
        mlp.backward(cache, mse_loss_gradient(cache.output, target), &grads);

    const Eigen::Index n = mlp.parameter_count();
    Eigen::VectorXd flat(n);
    mlp.write_flat(flat, 0);
    Eigen::VectorXd analytic(n);
    Mlp::write_flat_gradients(grads, analytic, 0);

    const double h = 1e-6;
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd bumped = flat;
        bumped[i] = flat[i] + h;
        mlp.read_flat(bumped, 0);
        const double lp = finite_difference_loss(mlp, x, target);
        bumped[i] = flat[i] - h;
        mlp.read_flat(bumped, 0);
        const double lm = finite_difference_loss(mlp, x, target);
        const double numeric = (lp - lm) / (2.0 * h);
        CHECK(analytic[i] == doctest::Approx(numeric).epsilon(1e-6));
    }
    mlp.read_flat(flat, 0);

    // Input gradient too.
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd xb = x;
        xb[i] = x[i] + h;
        const double lp = finite_difference_loss(mlp, xb, target);
        xb[i] = x[i] - h;
        const double lm = finite_difference_loss(mlp, xb, target);
        CHECK(grad_in[i] == doctest::Approx((lp - lm) / (2.0 * h)).epsilon(1e-6));
    }
}

TEST_CASE("flat parameter round trip preserves the network exactly") {
    Rng rng(9);
    Mlp mlp = Mlp::random({5, 7, 3}, Activation::Tanh, Activation::Identity, rng);
    const Eigen::Index n = mlp.parameter_count();
    CHECK(n == (5 * 7 + 7) + (7 * 3 + 3));

    Eigen::VectorXd flat(n + 4);  // nonzero offset on purpose
    flat.setConstant(-99.0);
    mlp.write_flat(flat, 4);

    Mlp copy = Mlp::random({5, 7, 3}, Activation::Tanh, Activation::Identity, rng);
    copy.read_flat(flat, 4);
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
    CHECK(copy.forward(x).isApprox(mlp.forward(x), 0.0));
    CHECK(flat.head(4).isApproxToConstant(-99.0));
}

TEST_CASE("layout names every tensor in flat order") {
    Rng rng(2);
    const Mlp mlp = Mlp::random({3, 4, 2}, Activation::Tanh, Activation::Identity, rng);
    ParameterLayout layout;
    mlp.append_layout(layout, "net");
    REQUIRE(layout.slots().size() == 4);
    CHECK(layout.slots()[0].id == "net.layer0.weights");
    CHECK(layout.slots()[1].id == "net.layer0.bias");
    CHECK(layout.slots()[2].id == "net.layer1.weights");
    CHECK(layout.slots()[3].id == "net.layer1.bias");
    CHECK(layout.slot("net.layer0.weights").rows == 4);
    CHECK(layout.slot("net.layer0.weights").cols == 3);
    CHECK(layout.total_size() == mlp.parameter_count());
}

namespace {

/// y = W x fit by gradient descent: one-layer regression, four samples.
class TinyRegression : public GradientSampleModel {
  public:
    TinyRegression() {
        Rng rng(21);
        net_ = Mlp::random({2, 2}, Activation::Identity, Activation::Identity, rng, 0.5);
        inputs_ = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0),
                   Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(-1.0, 0.5)};
        Eigen::Matrix2d w_true;
        w_true << 0.7, -0.3, 0.2, 0.9;
        for (const auto& x : inputs_) targets_.push_back(w_true * x);
    }

    Eigen::Index parameter_count() const override { return net_.parameter_count(); }
    Eigen::VectorXd parameters() const override {
        Eigen::VectorXd flat(net_.parameter_count());
        net_.write_flat(flat, 0);
        return flat;
    }
    void set_parameters(const Eigen::VectorXd& theta) override { net_.read_flat(theta, 0); }
    std::size_t train_size() const override { return inputs_.size(); }
    std::size_t test_size() const override { return inputs_.size(); }
    double train_loss(std::size_t i) override {
        return mse_loss(net_.forward(inputs_[i]), targets_[i]);
    }
    double test_loss(std::size_t i) override { return train_loss(i); }
    double train_loss_and_gradient(std::size_t i, Eigen::VectorXd& grad) override {
        Mlp::Cache cache;
        net_.forward_cached(inputs_[i], cache);
        Mlp::Gradients grads;
        net_.backward(cache, mse_loss_gradient(cache.output, targets_[i]), &grads);
        grad.resize(net_.parameter_count());
        Mlp::write_flat_gradients(grads, grad, 0);
        return mse_loss(cache.output, targets_[i]);
    }

  private:
    Mlp net_;
    std::vector<Eigen::Vector2d> inputs_;
    std::vector<Eigen::Vector2d> targets_;
};

}  // namespace

TEST_CASE("backprop loop drives a small regression to near-zero loss") {
    TinyRegression model;
    BackpropConfig config;
    config.learning_rate = 0.1;
    config.seed = 3;
    const TrainingTrace trace = backprop_train(model, config, 60);
    REQUIRE(trace.records.size() == 60);
    CHECK(trace.records.front().epoch == 1);
    CHECK(trace.records.back().epoch == 60);
    CHECK(trace.records.back().test_loss < 1e-4);

    // Adam variant converges too.
    TinyRegression fresh;
    BackpropConfig adam;
    adam.optimizer = OptimizerKind::Adam;
    adam.learning_rate = 0.05;
    const TrainingTrace adam_trace = backprop_train(fresh, adam, 120);
    CHECK(adam_trace.records.back().test_loss < 1e-4);
}

TEST_CASE("backprop records per-epoch means and epoch-end test losses") {
    TinyRegression model;
    BackpropConfig config;
    config.learning_rate = 1e-12;  // effectively frozen: train and test must agree
    const TrainingTrace trace = backprop_train(model, config, 2);
    REQUIRE(trace.records.size() == 2);
    CHECK(trace.records[0].train_loss == doctest::Approx(trace.records[0].test_loss));
    CHECK(trace.records[0].train_loss == doctest::Approx(trace.records[1].train_loss));

    BackpropConfig bad;
    bad.learning_rate = 0.0;
    TinyRegression fresh;
    CHECK_THROWS_AS(backprop_train(fresh, bad, 1), std::invalid_argument);
}
