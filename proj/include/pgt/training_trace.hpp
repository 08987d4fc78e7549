#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pgt {

/// Shortest round-trip decimal text for a double. Deterministic, locale-free.
std::string format_double(double value);

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double test_loss = 0.0;
    double seconds = 0.0;  // wall time, reported separately from the deterministic columns
};

/// Per-epoch loss records for one training run, plus the config snapshot and
/// seed that produced it.
struct TrainingTrace {
    std::vector<EpochRecord> records;
    std::vector<std::pair<std::string, std::string>> config_snapshot;
    std::uint64_t seed = 0;

    void add(int epoch, double train_loss, double test_loss, double seconds);

    /// Smallest test loss over the run; epoch of the minimum via out param.
    double min_test_loss(int* epoch_of_min = nullptr) const;
    double min_train_loss(int* epoch_of_min = nullptr) const;

    /// Writes `epoch,train_loss,test_loss[,seconds]` rows preceded by
    /// `# key = value` snapshot lines. Wall times are machine-dependent, so
    /// deterministic outputs leave them out (include_timing = false) and ship
    /// them in a sidecar file instead.
    void write_csv(std::ostream& os, bool include_timing) const;
    void write_timing_csv(std::ostream& os) const;  // epoch,seconds sidecar

    /// Reads a trace CSV produced by write_csv (either column set).
    static TrainingTrace read_csv(std::istream& is);
};

}  // namespace pgt
