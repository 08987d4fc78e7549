#include "pgt/data_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace pgt;

namespace {

const std::string kWdbcPath = std::string(PGT_SOURCE_DIR) + "/data/wdbc.csv";

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream os(path);
    os << content;
    return path;
}

}  // namespace

TEST_CASE("the diagnostic table loads with the expected shape and classes") {
    const TabularDataset data = load_wdbc(kWdbcPath);
    REQUIRE(data.features.rows() == 569);
    REQUIRE(data.features.cols() == 30);
    REQUIRE(data.labels.rows() == 569);
    REQUIRE(data.labels.cols() == 2);

    int malignant = 0, benign = 0;
    for (Eigen::Index i = 0; i < data.labels.rows(); ++i) {
        CHECK(data.labels.row(i).sum() == 1.0);  // one-hot
        if (data.labels(i, 0) == 1.0) {
            ++malignant;
        } else {
            CHECK(data.labels(i, 1) == 1.0);
            ++benign;
        }
    }
    CHECK(malignant == 212);
    CHECK(benign == 357);
}

TEST_CASE("the 80/20 split is disjoint, exhaustive, and seed-stable") {
    const TabularDataset data = load_wdbc(kWdbcPath, 0.8, 1);
    CHECK(data.train_size() == 455);
    CHECK(data.test_size() == 114);

    std::set<Eigen::Index> seen(data.train_indices.begin(), data.train_indices.end());
    for (Eigen::Index i : data.test_indices) {
        CHECK(seen.insert(i).second);  // no overlap with the train rows
    }
    CHECK(seen.size() == 569);

    const TabularDataset again = load_wdbc(kWdbcPath, 0.8, 1);
    CHECK(again.train_indices == data.train_indices);
    CHECK(again.test_indices == data.test_indices);

    const TabularDataset other = load_wdbc(kWdbcPath, 0.8, 2);
    CHECK(other.train_indices != data.train_indices);
}

TEST_CASE("features are z-scored with training-split statistics") {
    const TabularDataset data = load_wdbc(kWdbcPath);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(30);
    for (Eigen::Index i : data.train_indices) {
        mean += data.features.row(i).transpose();
    }
    mean /= static_cast<double>(data.train_indices.size());
    Eigen::VectorXd var = Eigen::VectorXd::Zero(30);
    for (Eigen::Index i : data.train_indices) {
        var += (data.features.row(i).transpose() - mean).array().square().matrix();
    }
    var /= static_cast<double>(data.train_indices.size());

    for (Eigen::Index j = 0; j < 30; ++j) {
        CHECK(std::abs(mean[j]) < 1e-9);
        CHECK(var[j] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(data.feature_std[j] > 0.0);
    }

    // Raw inputs span wildly different ranges, so scaling must be visible in
    // the stored statistics rather than a no-op.
    CHECK(data.feature_mean.maxCoeff() > 100.0);   // e.g. area-scale features
    CHECK(data.feature_mean.minCoeff() < 1.0);     // e.g. dimensionless ratios
}

TEST_CASE("malformed tables are rejected with the row number named") {
    SUBCASE("missing fields") {
        const auto path = write_temp("wdbc_bad_fields.csv", "1,M,1.0,2.0\n");
        CHECK_THROWS_WITH_AS(load_wdbc(path.string()), doctest::Contains("row 1"),
                             std::runtime_error);
        std::filesystem::remove(path);
    }
    SUBCASE("unknown diagnosis") {
        std::string good_row = "1,M";
        for (int j = 0; j < 30; ++j) good_row += ",1.0";
        std::string bad_row = "2,X";
        for (int j = 0; j < 30; ++j) bad_row += ",1.0";
        const auto path = write_temp("wdbc_bad_diag.csv", good_row + "\n" + bad_row + "\n");
        CHECK_THROWS_WITH_AS(load_wdbc(path.string()), doctest::Contains("row 2"),
                             std::runtime_error);
        std::filesystem::remove(path);
    }
    SUBCASE("non-numeric feature") {
        std::string row = "1,M";
        for (int j = 0; j < 29; ++j) row += ",1.0";
        row += ",oops";
        const auto path = write_temp("wdbc_bad_num.csv", row + "\n");
        CHECK_THROWS_WITH_AS(load_wdbc(path.string()), doctest::Contains("oops"),
                             std::runtime_error);
        std::filesystem::remove(path);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_wdbc("/nonexistent/nowhere.csv"), std::runtime_error);
    }
    SUBCASE("bad train fraction") {
        CHECK_THROWS_AS(load_wdbc(kWdbcPath, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(load_wdbc(kWdbcPath, 1.0), std::invalid_argument);
    }
}

TEST_CASE("a header row is skipped when the second column is no diagnosis") {
    std::string content = "id,diagnosis";
    for (int j = 0; j < 30; ++j) content += ",f" + std::to_string(j + 1);
    content += "\n";
    for (int i = 0; i < 2; ++i) {
        content += std::to_string(i + 1) + (i == 0 ? ",M" : ",B");
        for (int j = 0; j < 30; ++j) content += "," + std::to_string(j + i);
        content += "\n";
    }
    const auto path = write_temp("wdbc_header.csv", content);
    const TabularDataset data = load_wdbc(path.string(), 0.5, 1);
    CHECK(data.features.rows() == 2);
    std::filesystem::remove(path);
}

TEST_CASE("sequence tasks and their names") {
    CHECK(seq_task_from_string("copy") == SeqTask::Copy);
    CHECK(seq_task_from_string("reverse") == SeqTask::Reverse);
    CHECK(to_string(SeqTask::Copy) == "copy");
    CHECK(to_string(SeqTask::Reverse) == "reverse");
    CHECK_THROWS_AS(seq_task_from_string("shuffle"), std::invalid_argument);
}

TEST_CASE("generated pairs respect the task and reserve the start token") {
    Rng rng(33);
    const SequencePairDataset copy = make_seq2seq(SeqTask::Copy, 50, 20, 16, 8, rng);
    CHECK(copy.train_src.size() == 50);
    CHECK(copy.train_tgt.size() == 50);
    CHECK(copy.test_src.size() == 20);
    CHECK(copy.vocab_size == 16);
    for (std::size_t i = 0; i < copy.train_src.size(); ++i) {
        REQUIRE(copy.train_src[i].size() == 8);
        CHECK(copy.train_tgt[i] == copy.train_src[i]);
        for (int id : copy.train_src[i]) {
            CHECK(id >= 1);  // 0 is reserved for the decoder start
            CHECK(id < 16);
        }
    }

    Rng rng2(33);
    const SequencePairDataset rev = make_seq2seq(SeqTask::Reverse, 50, 20, 16, 8, rng2);
    for (std::size_t i = 0; i < rev.train_src.size(); ++i) {
        std::vector<int> reversed = rev.train_src[i];
        std::reverse(reversed.begin(), reversed.end());
        CHECK(rev.train_tgt[i] == reversed);
        CHECK(rev.train_src[i] == copy.train_src[i]);  // same rng, same draws
    }

    CHECK_THROWS_AS(make_seq2seq(SeqTask::Copy, 50, 20, 1, 8, rng), std::invalid_argument);
    CHECK_THROWS_AS(make_seq2seq(SeqTask::Copy, 0, 20, 16, 8, rng), std::invalid_argument);
    CHECK_THROWS_AS(make_seq2seq(SeqTask::Copy, 50, 20, 16, 0, rng), std::invalid_argument);
}

TEST_CASE("sequence pairs round trip through their text form") {
    Rng rng(9);
    const SequencePairDataset data = make_seq2seq(SeqTask::Reverse, 12, 0, 10, 5, rng);
    std::ostringstream out;
    write_sequence_pairs(out, data.train_src, data.train_tgt);

    std::istringstream in(out.str());
    std::vector<std::vector<int>> src, tgt;
    read_sequence_pairs(in, src, tgt);
    CHECK(src == data.train_src);
    CHECK(tgt == data.train_tgt);

    // The format itself: "s s s\tt t t".
    std::ostringstream one;
    write_sequence_pairs(one, {{1, 2, 3}}, {{3, 2, 1}});
    CHECK(one.str() == "1 2 3\t3 2 1\n");

    CHECK_THROWS_AS(write_sequence_pairs(one, {{1}}, {}), std::invalid_argument);
}

TEST_CASE("malformed pair files are rejected with the line number named") {
    std::vector<std::vector<int>> src, tgt;
    SUBCASE("missing tab") {
        std::istringstream in("1 2 3 4\n");
        CHECK_THROWS_WITH_AS(read_sequence_pairs(in, src, tgt), doctest::Contains("line 1"),
                             std::runtime_error);
    }
    SUBCASE("garbage token on a later line") {
        std::istringstream in("1 2\t2 1\n3 x\t3 3\n");
        CHECK_THROWS_WITH_AS(read_sequence_pairs(in, src, tgt), doctest::Contains("line 2"),
                             std::runtime_error);
    }
    SUBCASE("negative id") {
        std::istringstream in("1 -2\t2 1\n");
        CHECK_THROWS_WITH_AS(read_sequence_pairs(in, src, tgt), doctest::Contains("negative"),
                             std::runtime_error);
    }
    SUBCASE("empty side") {
        std::istringstream in("\t1 2\n");
        CHECK_THROWS_WITH_AS(read_sequence_pairs(in, src, tgt), doctest::Contains("empty"),
                             std::runtime_error);
    }
}
