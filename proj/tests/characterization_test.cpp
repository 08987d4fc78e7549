#include "pgt/characterization.hpp"

#include "pgt/reservoir.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

using namespace pgt;

TEST_CASE("binary sequences are fair, reproducible coin flips") {
    Rng rng(101);
    const std::vector<int> seq = generate_binary_sequence(10000, rng);
    REQUIRE(seq.size() == 10000);
    double mean = 0.0;
    for (int bit : seq) {
        CHECK((bit == 0 || bit == 1));
        mean += bit;
    }
    mean /= static_cast<double>(seq.size());
    CHECK(std::abs(mean - 0.5) < 0.03);

    Rng rng2(101);
    CHECK(generate_binary_sequence(10000, rng2) == seq);
}

TEST_CASE("recall and parity targets on a worked example") {
    const std::vector<int> seq = {1, 0, 1, 1, 0};

    CHECK(stm_target(seq, 3, 0) == 1);  // current input
    CHECK(stm_target(seq, 3, 2) == 0);  // two steps back
    CHECK(stm_target(seq, 4, 4) == 1);  // the whole way back

    CHECK(parity_target(seq, 3, 0) == 1);            // window of one
    CHECK(parity_target(seq, 3, 1) == (1 ^ 1));      // seq[2..3]
    CHECK(parity_target(seq, 4, 2) == (1 ^ 1 ^ 0));  // seq[2..4]
    CHECK(parity_target(seq, 4, 4) == (1 ^ 0 ^ 1 ^ 1 ^ 0));

    CHECK_THROWS_AS(stm_target(seq, 5, 0), std::invalid_argument);
    CHECK_THROWS_AS(stm_target(seq, 2, 3), std::invalid_argument);
    CHECK_THROWS_AS(parity_target(seq, 1, 4), std::invalid_argument);
}

TEST_CASE("squared correlation hits the boundary cases exactly") {
    Eigen::VectorXd a(5);
    a << 1.0, 2.0, 3.0, 4.0, 5.0;

    CHECK(squared_correlation(a, (2.0 * a.array() + 3.0).matrix().eval()) == doctest::Approx(1.0));
    CHECK(squared_correlation(a, (-a).eval()) == doctest::Approx(1.0));  // sign-blind
    CHECK(squared_correlation(a, Eigen::VectorXd::Constant(5, 7.0)) == 0.0);
    CHECK(squared_correlation(Eigen::VectorXd::Constant(5, 7.0), a) == 0.0);

    Eigen::VectorXd b(5);
    b << 2.0, 1.0, 4.0, 3.0, 5.0;
    const double r2 = squared_correlation(a, b);
    CHECK(r2 > 0.0);
    CHECK(r2 < 1.0);
    CHECK(squared_correlation(a, b) == squared_correlation(b, a));

    CHECK_THROWS_AS(squared_correlation(a, Eigen::VectorXd::Zero(4)), std::invalid_argument);
    CHECK_THROWS_AS(squared_correlation(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)),
                    std::invalid_argument);
}

TEST_CASE("linear readout recovers exact affine targets") {
    Rng rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::MatrixXd states(50, 3);
    for (Eigen::Index r = 0; r < states.rows(); ++r) {
        for (Eigen::Index c = 0; c < states.cols(); ++c) states(r, c) = unit(rng);
    }
    Eigen::Vector3d w_true(1.0, -2.0, 0.5);
    const double b_true = 0.25;
    const Eigen::VectorXd targets = ((states * w_true).array() + b_true).matrix();

    const RidgeReadout readout = train_linear_readout(states, targets, 0.0);
    CHECK(readout.weights.isApprox(w_true, 1e-8));
    CHECK(readout.bias == doctest::Approx(b_true).epsilon(1e-8));
    CHECK(readout.predict(states).isApprox(targets, 1e-8));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
    CHECK(readout.predict(ones) == doctest::Approx(w_true.sum() + b_true));
}

TEST_CASE("singular normal equations demand a positive ridge") {
    Eigen::MatrixXd states(6, 2);
    states.col(0) = Eigen::VectorXd::LinSpaced(6, 0.0, 1.0);
    states.col(1) = states.col(0);  // duplicated column: rank deficient
    const Eigen::VectorXd targets = states.col(0);

    CHECK_THROWS_WITH_AS(train_linear_readout(states, targets, 0.0),
                         doctest::Contains("singular"), std::runtime_error);

    const RidgeReadout readout = train_linear_readout(states, targets, 1e-6);
    CHECK(readout.predict(states).isApprox(targets, 1e-3));

    CHECK_THROWS_AS(train_linear_readout(states, targets, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(train_linear_readout(states, Eigen::VectorXd::Zero(5), 1e-6),
                    std::invalid_argument);
}

TEST_CASE("capacity options are validated") {
    CapacityOptions options;
    CHECK_NOTHROW(options.validate());

    CapacityOptions bad = options;
    bad.washout = bad.t_max - 1;  // windows would reach before the sequence
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("washout"), std::invalid_argument);

    bad = options;
    bad.t_max = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = options;
    bad.train_fraction = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = options;
    bad.sequence_length = 103;  // washout 100 leaves too few rows to split
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("a two-tap delay line scores almost exactly two bits of recall") {
    DelayLineReservoir line(2);
    CapacityOptions options;
    options.sequence_length = 1500;
    options.t_max = 6;
    options.washout = 50;
    Rng rng(42);
    const CapacityReport report = measure_capacity(line, CapacityTask::Stm, options, rng);

    REQUIRE(report.cor2.size() == 6);
    CHECK(report.cor2[0] > 0.98);  // state holds the current input
    CHECK(report.cor2[1] > 0.98);  // and the previous one
    for (std::size_t i = 2; i < report.cor2.size(); ++i) {
        CHECK(report.cor2[i] < 0.05);  // older inputs are gone
    }
    for (double c : report.cor2) {
        CHECK(c >= -1e-9);
        CHECK(c <= 1.0 + 1e-9);
    }
    CHECK(report.capacity > 1.9);
    CHECK(report.capacity < 2.15);
    CHECK(report.train_rows + report.eval_rows == 1500 - 50);
}

TEST_CASE("parity window alignment is observable through a one-tap line") {
    CapacityOptions options;
    options.sequence_length = 1500;
    options.t_max = 3;
    options.washout = 50;

    SUBCASE("window ending at the current input is solvable at delay 1") {
        options.parity_include_current = true;
        DelayLineReservoir line(1);
        Rng rng(42);
        const CapacityReport report =
            measure_capacity(line, CapacityTask::ParityCheck, options, rng);
        CHECK(report.cor2[0] > 0.98);  // parity of {seq[t]} is seq[t] itself
        CHECK(report.cor2[1] < 0.05);  // XOR of two bits is not linear
        CHECK(report.capacity < 1.2);
    }

    SUBCASE("window ending at the previous input is invisible to it") {
        options.parity_include_current = false;
        DelayLineReservoir line(1);
        Rng rng(42);
        const CapacityReport report =
            measure_capacity(line, CapacityTask::ParityCheck, options, rng);
        CHECK(report.cor2[0] < 0.05);  // target is seq[t-1]; state only has seq[t]
        CHECK(report.capacity < 0.15);
    }
}

TEST_CASE("capacity is refused for stateless reservoirs") {
    FrozenNetConfig config;
    config.input_dim = 1;
    config.layer_sizes = {4, 3};
    config.stateful = false;
    FrozenNetReservoir res(config);
    CapacityOptions options;
    options.sequence_length = 1500;
    options.washout = 50;
    Rng rng(1);
    CHECK_THROWS_WITH_AS(measure_capacity(res, CapacityTask::Stm, options, rng),
                         doctest::Contains("stateless"), std::invalid_argument);
}

TEST_CASE("constant reservoirs are flagged as degenerate, scored zero") {
    class StuckReservoir : public Reservoir {
      public:
        Eigen::Index input_dim() const override { return 1; }
        Eigen::Index output_dim() const override { return 3; }
        bool stateful() const override { return true; }
        Eigen::VectorXd forward(const Eigen::VectorXd&) override {
            return Eigen::VectorXd::Constant(3, 0.75);
        }
    } stuck;
    CapacityOptions options;
    options.sequence_length = 400;
    options.t_max = 2;
    options.washout = 20;
    Rng rng(3);
    const CapacityReport report = measure_capacity(stuck, CapacityTask::Stm, options, rng);
    CHECK(report.capacity == 0.0);
    CHECK(report.degenerate_delays == std::vector<int>{1, 2});
}

TEST_CASE("capacity reports have a fixed csv shape") {
    CapacityReport report;
    report.task = CapacityTask::Stm;
    report.cor2 = {1.0, 0.5};
    report.capacity = 1.5;
    std::ostringstream out;
    report.write_csv(out);
    CHECK(out.str() == "task,t_delay,cor2\nstm,1,1\nstm,2,0.5\nstm,TOTAL,1.5\n");

    report.task = CapacityTask::ParityCheck;
    std::ostringstream no_header;
    report.write_csv(no_header, false);
    CHECK(no_header.str() == "pc,1,1\npc,2,0.5\npc,TOTAL,1.5\n");

    CHECK(to_string(CapacityTask::Stm) == "stm");
    CHECK(to_string(CapacityTask::ParityCheck) == "pc");
}

TEST_CASE("identical seeds give identical capacity reports") {
    CapacityOptions options;
    options.sequence_length = 800;
    options.t_max = 4;
    options.washout = 30;

    auto run = [&]() {
        DelayLineReservoir line(3);
        Rng rng(77);
        return measure_capacity(line, CapacityTask::Stm, options, rng);
    };
    const CapacityReport a = run();
    const CapacityReport b = run();
    REQUIRE(a.cor2.size() == b.cor2.size());
    for (std::size_t i = 0; i < a.cor2.size(); ++i) {
        CHECK(a.cor2[i] == b.cor2[i]);  // bit-for-bit
    }
    CHECK(a.capacity == b.capacity);
}
