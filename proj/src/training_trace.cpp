#include "pgt/training_trace.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pgt {

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return {buf, ptr};
}

void TrainingTrace::add(int epoch, double train_loss, double test_loss, double seconds) {
    if (!records.empty() && epoch <= records.back().epoch) {
        throw std::logic_error("TrainingTrace: epoch indices must be strictly increasing");
    }
    if (!std::isfinite(train_loss) || !std::isfinite(test_loss)) {
        throw std::runtime_error("TrainingTrace: non-finite loss at epoch " + std::to_string(epoch));
    }
    records.push_back({epoch, train_loss, test_loss, seconds});
}

double TrainingTrace::min_test_loss(int* epoch_of_min) const {
    if (records.empty()) throw std::logic_error("TrainingTrace: empty trace");
    double best = records.front().test_loss;
    int at = records.front().epoch;
    for (const auto& r : records) {
        if (r.test_loss < best) {
            best = r.test_loss;
            at = r.epoch;
        }
    }
    if (epoch_of_min) *epoch_of_min = at;
    return best;
}

double TrainingTrace::min_train_loss(int* epoch_of_min) const {
    if (records.empty()) throw std::logic_error("TrainingTrace: empty trace");
    double best = records.front().train_loss;
    int at = records.front().epoch;
    for (const auto& r : records) {
        if (r.train_loss < best) {
            best = r.train_loss;
            at = r.epoch;
        }
    }
    if (epoch_of_min) *epoch_of_min = at;
    return best;
}

void TrainingTrace::write_csv(std::ostream& os, bool include_timing) const {
    for (const auto& [key, value] : config_snapshot) {
        os << "# " << key << " = " << value << "\n";
    }
    os << "# seed = " << seed << "\n";
    os << (include_timing ? "epoch,train_loss,test_loss,seconds" : "epoch,train_loss,test_loss")
       << "\n";
    for (const auto& r : records) {
        os << r.epoch << ',' << format_double(r.train_loss) << ',' << format_double(r.test_loss);
        if (include_timing) os << ',' << format_double(r.seconds);
        os << "\n";
    }
}

void TrainingTrace::write_timing_csv(std::ostream& os) const {
    os << "# wall-clock seconds per epoch; machine-dependent, not covered by determinism\n";
    os << "epoch,seconds\n";
    for (const auto& r : records) {
        os << r.epoch << ',' << format_double(r.seconds) << "\n";
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

double parse_double(const std::string& text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::runtime_error("TrainingTrace: bad numeric field '" + text + "'");
    }
    return v;
}

}  // namespace

TrainingTrace TrainingTrace::read_csv(std::istream& is) {
    TrainingTrace trace;
    std::string line;
    bool header_seen = false;
    bool has_seconds = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                std::string value = line.substr(eq + 1);
                auto trim = [](std::string& s) {
                    const auto a = s.find_first_not_of(" \t");
                    const auto b = s.find_last_not_of(" \t");
                    s = (a == std::string::npos) ? std::string{} : s.substr(a, b - a + 1);
                };
                trim(key);
                trim(value);
                if (key == "seed") {
                    trace.seed = std::stoull(value);
                } else {
                    trace.config_snapshot.emplace_back(key, value);
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind("epoch,train_loss,test_loss", 0) != 0) {
                throw std::runtime_error("TrainingTrace: unrecognized header '" + line + "'");
            }
            has_seconds = line.find(",seconds") != std::string::npos;
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        const std::size_t expected = has_seconds ? 4 : 3;
        if (fields.size() != expected) {
            throw std::runtime_error("TrainingTrace: row with " + std::to_string(fields.size()) +
                                     " fields, expected " + std::to_string(expected));
        }
        EpochRecord r;
        r.epoch = std::stoi(fields[0]);
        r.train_loss = parse_double(fields[1]);
        r.test_loss = parse_double(fields[2]);
        r.seconds = has_seconds ? parse_double(fields[3]) : 0.0;
        trace.records.push_back(r);
    }
    if (!header_seen) throw std::runtime_error("TrainingTrace: no header row found");
    return trace;
}

}  // namespace pgt
