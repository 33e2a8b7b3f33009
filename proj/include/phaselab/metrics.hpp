#ifndef PHASELAB_METRICS_HPP
#define PHASELAB_METRICS_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "phaselab/crf.hpp"

namespace phaselab {

// Frame-level counts, counts[true][predicted].
struct ConfusionMatrix {
    std::size_t n_classes = 0;
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;

    explicit ConfusionMatrix(std::size_t n_classes);
    std::int64_t& at(std::size_t truth, std::size_t pred) { return counts[truth * n_classes + pred]; }
    std::int64_t at(std::size_t truth, std::size_t pred) const { return counts[truth * n_classes + pred]; }
};

ConfusionMatrix confusion(const std::vector<TagSequence>& predictions,
                          const std::vector<TagSequence>& truths, std::size_t n_classes);

// Accuracy plus per-class and macro precision/recall/F1. A class absent
// from both truth and predictions is excluded from the macro averages and
// flagged; an undefined precision or recall (zero denominator) for a class
// that does appear counts as 0.
struct MetricReport {
    double accuracy = 0.0;
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<bool> class_present;   // appears in truth or predictions
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
};

MetricReport metric_report(const ConfusionMatrix& cm);

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;  // population (divisor n)
};

MeanStd aggregate_values(std::span<const double> values);

// Per-metric mean and population standard deviation over repeats. Keys:
// accuracy, macro_precision, macro_recall, macro_f1.
struct AggregateReport {
    int repeats = 0;
    std::map<std::string, MeanStd> metrics;
};

AggregateReport aggregate(const std::vector<MetricReport>& reports);

// "84.1 ± 1.0": percent with one decimal, the tables' convention.
std::string format_percent(const MeanStd& value);

}  // namespace phaselab

#endif
