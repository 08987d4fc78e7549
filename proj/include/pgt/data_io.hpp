#pragma once

#include "pgt/param_space.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pgt {

/// Tabular classification data, standardised with train-split statistics.
struct TabularDataset {
    Eigen::MatrixXd features;  // n x d, z-scored
    Eigen::MatrixXd labels;    // n x k, one-hot
    std::vector<Eigen::Index> train_indices;
    std::vector<Eigen::Index> test_indices;
    Eigen::VectorXd feature_mean;  // train-split statistics used for scaling
    Eigen::VectorXd feature_std;

    Eigen::Index train_size() const { return static_cast<Eigen::Index>(train_indices.size()); }
    Eigen::Index test_size() const { return static_cast<Eigen::Index>(test_indices.size()); }
};

/// Reads the diagnostic breast-cancer table: one row per record,
/// `id,diagnosis,f1,...,f30` with diagnosis M or B. Malignant maps to label
/// [1, 0], benign to [0, 1]. The split is drawn with `split_seed`; features
/// are z-scored using the mean/std of the training rows only.
TabularDataset load_wdbc(const std::string& path, double train_fraction = 0.8,
                         std::uint64_t split_seed = 1);

enum class SeqTask { Copy, Reverse };

SeqTask seq_task_from_string(const std::string& name);
std::string to_string(SeqTask task);

struct SequencePairDataset {
    std::vector<std::vector<int>> train_src, train_tgt;
    std::vector<std::vector<int>> test_src, test_tgt;
    int vocab_size = 0;
};

/// Random sequences with token ids in [1, vocab_size); id 0 is reserved for
/// the decoder start-of-sequence token. Targets are the source copied or
/// reversed.
SequencePairDataset make_seq2seq(SeqTask task, std::size_t n_train, std::size_t n_test,
                                 int vocab_size, std::size_t seq_len, Rng& rng);

/// One pair per line: space-separated source ids, a tab, space-separated
/// target ids.
void write_sequence_pairs(std::ostream& os, const std::vector<std::vector<int>>& src,
                          const std::vector<std::vector<int>>& tgt);
void read_sequence_pairs(std::istream& is, std::vector<std::vector<int>>& src,
                         std::vector<std::vector<int>>& tgt);

}  // namespace pgt
