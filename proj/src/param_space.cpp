#include "pgt/param_space.hpp"

#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

namespace pgt {

Eigen::Index ParameterLayout::add(std::string id, Eigen::Index rows, Eigen::Index cols) {
    if (rows <= 0 || cols <= 0) {
        throw std::invalid_argument("ParameterLayout::add: slot '" + id + "' has empty shape");
    }
    TensorSlot slot;
    slot.id = std::move(id);
    slot.rows = rows;
    slot.cols = cols;
    slot.offset = total_;
    total_ += slot.size();
    slots_.push_back(std::move(slot));
    return slots_.back().offset;
}

const TensorSlot& ParameterLayout::slot(const std::string& id) const {
    for (const auto& s : slots_) {
        if (s.id == id) return s;
    }
    throw std::out_of_range("ParameterLayout: no slot named '" + id + "'");
}

Eigen::Map<Eigen::MatrixXd> ParameterVector::matrix(const std::string& id) {
    const TensorSlot& s = layout.slot(id);
    return {values.data() + s.offset, s.rows, s.cols};
}

Eigen::Map<const Eigen::MatrixXd> ParameterVector::matrix(const std::string& id) const {
    const TensorSlot& s = layout.slot(id);
    return {values.data() + s.offset, s.rows, s.cols};
}

Eigen::Map<Eigen::VectorXd> ParameterVector::segment(const std::string& id) {
    const TensorSlot& s = layout.slot(id);
    return {values.data() + s.offset, s.size()};
}

Eigen::Map<const Eigen::VectorXd> ParameterVector::segment(const std::string& id) const {
    const TensorSlot& s = layout.slot(id);
    return {values.data() + s.offset, s.size()};
}

void ParameterVector::check_consistent() const {
    if (values.size() != layout.total_size()) {
        throw std::logic_error("ParameterVector: values length does not match layout");
    }
    Eigen::Index expected = 0;
    for (const auto& s : layout.slots()) {
        if (s.offset != expected) {
            throw std::logic_error("ParameterVector: slot '" + s.id + "' is not contiguous");
        }
        expected += s.size();
    }
    if (expected != values.size()) {
        throw std::logic_error("ParameterVector: layout does not cover values exactly");
    }
}

void PGTConfig::validate() const {
    if (range < 1) throw std::invalid_argument("PGTConfig: range must be >= 1");
    if (!(delta > 0.0)) throw std::invalid_argument("PGTConfig: delta must be > 0");
    if (dropout_scale < 0.0 || dropout_scale > 1.0) {
        throw std::invalid_argument("PGTConfig: dropout_scale must be in [0, 1]");
    }
    if (!(learning_rate > 0.0)) throw std::invalid_argument("PGTConfig: learning_rate must be > 0");
    if (!(adam_epsilon > 0.0)) throw std::invalid_argument("PGTConfig: adam_epsilon must be > 0");
    if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0) {
        throw std::invalid_argument("PGTConfig: adam betas must be in [0, 1)");
    }
}

PerturbationMatrix PerturbationMatrix::from_entries(Eigen::VectorXi entries, int range) {
    if (range < 1) throw std::invalid_argument("PerturbationMatrix: range must be >= 1");
    if ((entries.array().abs() > range).any()) {
        throw std::invalid_argument("PerturbationMatrix: entry outside [-range, range]");
    }
    PerturbationMatrix pm;
    pm.entries = std::move(entries);
    pm.range = range;
    pm.counts = pm.entries.cwiseAbs();
    return pm;
}

PerturbationMatrix sample_perturbation(Eigen::Index len, const PGTConfig& config, Rng& rng) {
    config.validate();
    if (len <= 0) throw std::invalid_argument("sample_perturbation: len must be > 0");

    std::uniform_int_distribution<int> entry_dist(-config.range, config.range);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Eigen::VectorXi entries(len);
    for (Eigen::Index i = 0; i < len; ++i) {
        int e = entry_dist(rng);
        if (config.dropout_scale > 0.0 && unit(rng) < config.dropout_scale) e = 0;
        entries[i] = e;
    }
    return PerturbationMatrix::from_entries(std::move(entries), config.range);
}

int count_2d_directions(int r) {
    if (r < 1) throw std::invalid_argument("count_2d_directions: r must be >= 1");
    std::set<std::pair<int, int>> rays;
    for (int a = -r; a <= r; ++a) {
        for (int b = -r; b <= r; ++b) {
            if (a == 0 && b == 0) continue;
            const int g = std::gcd(std::abs(a), std::abs(b));
            rays.emplace(a / g, b / g);
        }
    }
    return static_cast<int>(rays.size());
}

Eigen::VectorXd apply_perturbation(const Eigen::VectorXd& theta, const PerturbationMatrix& pm,
                                   double delta, int sign) {
    if (pm.entries.size() != theta.size()) {
        throw std::invalid_argument("apply_perturbation: perturbation length " +
                                    std::to_string(pm.entries.size()) +
                                    " does not match parameter length " +
                                    std::to_string(theta.size()));
    }
    if (sign != 1 && sign != -1) throw std::invalid_argument("apply_perturbation: sign must be +1 or -1");
    if (!(delta > 0.0)) throw std::invalid_argument("apply_perturbation: delta must be > 0");
    return theta + (sign * delta) * pm.entries.cast<double>();
}

ParameterVector apply_perturbation(const ParameterVector& theta, const PerturbationMatrix& pm,
                                   double delta, int sign) {
    ParameterVector out;
    out.layout = theta.layout;
    out.values = apply_perturbation(theta.values, pm, delta, sign);
    return out;
}

}  // namespace pgt
