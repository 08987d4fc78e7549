#include "pgt/data_io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pgt {

namespace {

constexpr Eigen::Index kWdbcFeatures = 30;

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        fields.emplace_back();
    }
    return fields;
}

}  // namespace

TabularDataset load_wdbc(const std::string& path, double train_fraction,
                         std::uint64_t split_seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("load_wdbc: train_fraction must lie in (0, 1)");
    }
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_wdbc: cannot open " + path);
    }

    std::vector<std::array<double, kWdbcFeatures>> rows;
    std::vector<int> malignant;  // 1 = M, 0 = B
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> fields = split_fields(line, ',');
        if (line_no == 1 && fields.size() > 1 && fields[1] != "M" && fields[1] != "B") {
            continue;  // header row
        }
        if (fields.size() != static_cast<std::size_t>(kWdbcFeatures) + 2) {
            throw std::runtime_error("load_wdbc: row " + std::to_string(line_no) + ": expected " +
                                     std::to_string(kWdbcFeatures + 2) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        if (fields[1] == "M") {
            malignant.push_back(1);
        } else if (fields[1] == "B") {
            malignant.push_back(0);
        } else {
            throw std::runtime_error("load_wdbc: row " + std::to_string(line_no) +
                                     ": unknown diagnosis '" + fields[1] + "'");
        }
        std::array<double, kWdbcFeatures> values{};
        for (Eigen::Index j = 0; j < kWdbcFeatures; ++j) {
            const std::string& cell = fields[static_cast<std::size_t>(j) + 2];
            try {
                std::size_t used = 0;
                values[static_cast<std::size_t>(j)] = std::stod(cell, &used);
                if (used != cell.size()) {
                    throw std::invalid_argument("trailing characters");
                }
            } catch (const std::exception&) {
                throw std::runtime_error("load_wdbc: row " + std::to_string(line_no) +
                                         ": bad numeric value '" + cell + "' in feature " +
                                         std::to_string(j + 1));
            }
        }
        rows.push_back(values);
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n < 2) {
        throw std::runtime_error("load_wdbc: " + path + " contains fewer than two data rows");
    }

    TabularDataset data;
    data.features.resize(n, kWdbcFeatures);
    data.labels.resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < kWdbcFeatures; ++j) {
            data.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        const bool m = malignant[static_cast<std::size_t>(i)] == 1;
        data.labels(i, 0) = m ? 1.0 : 0.0;
        data.labels(i, 1) = m ? 0.0 : 1.0;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng rng(split_seed);
    std::shuffle(order.begin(), order.end(), rng);
    auto n_train = static_cast<std::size_t>(train_fraction * static_cast<double>(n));
    n_train = std::min(std::max<std::size_t>(n_train, 1), static_cast<std::size_t>(n) - 1);
    data.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    data.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

    data.feature_mean = Eigen::VectorXd::Zero(kWdbcFeatures);
    for (Eigen::Index i : data.train_indices) {
        data.feature_mean += data.features.row(i).transpose();
    }
    data.feature_mean /= static_cast<double>(data.train_indices.size());
    data.feature_std = Eigen::VectorXd::Zero(kWdbcFeatures);
    for (Eigen::Index i : data.train_indices) {
        data.feature_std +=
            (data.features.row(i).transpose() - data.feature_mean).array().square().matrix();
    }
    data.feature_std =
        (data.feature_std / static_cast<double>(data.train_indices.size())).cwiseSqrt();
    for (Eigen::Index j = 0; j < kWdbcFeatures; ++j) {
        if (!(data.feature_std[j] > 1e-12)) {
            data.feature_std[j] = 1.0;  // constant feature: leave centred at zero
        }
    }
    data.features = (data.features.rowwise() - data.feature_mean.transpose()).array().rowwise() /
                    data.feature_std.transpose().array();
    return data;
}

SeqTask seq_task_from_string(const std::string& name) {
    if (name == "copy") return SeqTask::Copy;
    if (name == "reverse") return SeqTask::Reverse;
    throw std::invalid_argument("seq_task_from_string: unknown task '" + name +
                                "' (expected copy or reverse)");
}

std::string to_string(SeqTask task) {
    switch (task) {
        case SeqTask::Copy:
            return "copy";
        case SeqTask::Reverse:
            return "reverse";
    }
    throw std::logic_error("to_string: unknown sequence task");
}

SequencePairDataset make_seq2seq(SeqTask task, std::size_t n_train, std::size_t n_test,
                                 int vocab_size, std::size_t seq_len, Rng& rng) {
    if (vocab_size < 2) {
        throw std::invalid_argument(
            "make_seq2seq: vocab_size must be >= 2 (id 0 is the start token)");
    }
    if (seq_len == 0 || n_train == 0) {
        throw std::invalid_argument("make_seq2seq: need a positive seq_len and train count");
    }
    std::uniform_int_distribution<int> token(1, vocab_size - 1);
    auto draw = [&](std::size_t count, std::vector<std::vector<int>>& src,
                    std::vector<std::vector<int>>& tgt) {
        for (std::size_t i = 0; i < count; ++i) {
            std::vector<int> s(seq_len);
            for (auto& id : s) {
                id = token(rng);
            }
            std::vector<int> t = s;
            if (task == SeqTask::Reverse) {
                std::reverse(t.begin(), t.end());
            }
            src.push_back(std::move(s));
            tgt.push_back(std::move(t));
        }
    };
    SequencePairDataset data;
    data.vocab_size = vocab_size;
    draw(n_train, data.train_src, data.train_tgt);
    draw(n_test, data.test_src, data.test_tgt);
    return data;
}

void write_sequence_pairs(std::ostream& os, const std::vector<std::vector<int>>& src,
                          const std::vector<std::vector<int>>& tgt) {
    if (src.size() != tgt.size()) {
        throw std::invalid_argument("write_sequence_pairs: source/target count mismatch");
    }
    auto write_ids = [&](const std::vector<int>& ids) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (i > 0) os << ' ';
            os << ids[i];
        }
    };
    for (std::size_t i = 0; i < src.size(); ++i) {
        write_ids(src[i]);
        os << '\t';
        write_ids(tgt[i]);
        os << '\n';
    }
}

void read_sequence_pairs(std::istream& is, std::vector<std::vector<int>>& src,
                         std::vector<std::vector<int>>& tgt) {
    src.clear();
    tgt.clear();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error("read_sequence_pairs: line " + std::to_string(line_no) +
                                     ": missing tab separator");
        }
        auto parse_ids = [&](const std::string& part) {
            std::vector<int> ids;
            std::istringstream ss(part);
            int id = 0;
            while (ss >> id) {
                if (id < 0) {
                    throw std::runtime_error("read_sequence_pairs: line " +
                                             std::to_string(line_no) + ": negative token id");
                }
                ids.push_back(id);
            }
            if (!ss.eof()) {
                throw std::runtime_error("read_sequence_pairs: line " + std::to_string(line_no) +
                                         ": malformed token id");
            }
            if (ids.empty()) {
                throw std::runtime_error("read_sequence_pairs: line " + std::to_string(line_no) +
                                         ": empty sequence");
            }
            return ids;
        };
        src.push_back(parse_ids(line.substr(0, tab)));
        tgt.push_back(parse_ids(line.substr(tab + 1)));
    }
}

}  // namespace pgt
