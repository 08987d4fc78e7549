#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace pgt {

using Rng = std::mt19937_64;

/// One named tensor inside a flat parameter vector. Vectors use cols == 1.
struct TensorSlot {
    std::string id;
    Eigen::Index rows = 0;
    Eigen::Index cols = 1;
    Eigen::Index offset = 0;

    Eigen::Index size() const { return rows * cols; }
};

/// Ordered, contiguous map from named model tensors onto a flat array.
class ParameterLayout {
  public:
    /// Appends a slot directly after the previous one and returns its offset.
    Eigen::Index add(std::string id, Eigen::Index rows, Eigen::Index cols = 1);

    Eigen::Index total_size() const { return total_; }
    const std::vector<TensorSlot>& slots() const { return slots_; }
    const TensorSlot& slot(const std::string& id) const;

  private:
    std::vector<TensorSlot> slots_;
    Eigen::Index total_ = 0;
};

/// Flat view of all trainable parameters plus the layout that maps the
/// array back onto model tensors. Reservoir internals are never part of it.
struct ParameterVector {
    Eigen::VectorXd values;
    ParameterLayout layout;

    Eigen::Index size() const { return values.size(); }

    /// Matrix view of one slot (column-major, matching Eigen storage).
    Eigen::Map<Eigen::MatrixXd> matrix(const std::string& id);
    Eigen::Map<const Eigen::MatrixXd> matrix(const std::string& id) const;
    Eigen::Map<Eigen::VectorXd> segment(const std::string& id);
    Eigen::Map<const Eigen::VectorXd> segment(const std::string& id) const;

    /// Checks the layout covers values exactly; throws std::logic_error if not.
    void check_consistent() const;
};

enum class OptimizerKind { Sgd, Adam };
enum class ResamplePolicy { PerSample, PerEpoch };

/// Hyperparameters for perturbative training.
struct PGTConfig {
    int range = 1;               // perturbation entries live in [-range, range]
    double delta = 0.01;         // perturbation scale
    double dropout_scale = 0.0;  // probability an entry is zeroed
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::Sgd;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    ResamplePolicy resample = ResamplePolicy::PerSample;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

/// Integer direction in parameter space together with |entries|.
struct PerturbationMatrix {
    Eigen::VectorXi entries;
    int range = 1;
    Eigen::VectorXi counts;  // elementwise |entries|

    static PerturbationMatrix from_entries(Eigen::VectorXi entries, int range);
};

/// Draws a fresh perturbation direction: each entry uniform over the 2r+1
/// integers {-r,...,r}, then independently zeroed with probability
/// dropout_scale. Counts are recomputed from the final entries.
PerturbationMatrix sample_perturbation(Eigen::Index len, const PGTConfig& config, Rng& rng);

/// Number of distinct rays {(a,b) != (0,0), |a|,|b| <= r} after collapsing
/// scalar multiples. r=1 gives 8, r=2 gives 16.
int count_2d_directions(int r);

/// theta + sign * delta * entries, elementwise. sign must be +1 or -1.
Eigen::VectorXd apply_perturbation(const Eigen::VectorXd& theta, const PerturbationMatrix& pm,
                                   double delta, int sign);

ParameterVector apply_perturbation(const ParameterVector& theta, const PerturbationMatrix& pm,
                                   double delta, int sign);

}  // namespace pgt
