#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nids {

// Row = actual class, column = predicted class.
struct ConfusionMatrix {
    std::size_t n_classes = 0;
    std::vector<std::uint64_t> counts; // n_classes * n_classes, row-major

    std::uint64_t &at(std::size_t actual, std::size_t predicted) {
        return counts[actual * n_classes + predicted];
    }
    std::uint64_t at(std::size_t actual, std::size_t predicted) const {
        return counts[actual * n_classes + predicted];
    }
    std::uint64_t total() const;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
    // Set when the corresponding denominator was zero and the metric was
    // reported as 0 by convention.
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;
};

struct Aggregates {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    ConfusionMatrix cm;
    std::vector<std::string> class_names;
    std::vector<ClassMetrics> per_class;
    Aggregates micro;
    Aggregates macro;
    Aggregates weighted;
    double accuracy = 0.0;
};

ConfusionMatrix confusion(const std::vector<int> &actual, const std::vector<int> &predicted,
                          std::size_t n_classes);

EvalReport metrics(const ConfusionMatrix &cm, std::vector<std::string> class_names = {});

// Human-readable confusion matrix + metric table.
std::string render_report(const EvalReport &report);
// Machine-readable form: one tab-separated metrics record per line.
std::string render_records(const EvalReport &report);

} // namespace nids
