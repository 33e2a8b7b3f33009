#include "phaselab/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace phaselab {

ConfusionMatrix::ConfusionMatrix(std::size_t n)
    : n_classes(n), counts(n * n, 0) {
    if (n == 0) throw std::invalid_argument("ConfusionMatrix: need at least one class");
}

ConfusionMatrix confusion(const std::vector<TagSequence>& predictions,
                          const std::vector<TagSequence>& truths, std::size_t n_classes) {
    if (predictions.size() != truths.size()) {
        throw std::invalid_argument("confusion: sequence count mismatch");
    }
    ConfusionMatrix cm(n_classes);
    for (std::size_t s = 0; s < predictions.size(); ++s) {
        if (predictions[s].size() != truths[s].size()) {
            throw std::invalid_argument("confusion: length mismatch in sequence " +
                                        std::to_string(s));
        }
        for (std::size_t t = 0; t < predictions[s].size(); ++t) {
            const int truth = truths[s][t];
            const int pred = predictions[s][t];
            if (truth < 0 || pred < 0 || static_cast<std::size_t>(truth) >= n_classes ||
                static_cast<std::size_t>(pred) >= n_classes) {
                throw std::invalid_argument("confusion: label out of range");
            }
            ++cm.at(truth, pred);
            ++cm.total;
        }
    }
    return cm;
}

MetricReport metric_report(const ConfusionMatrix& cm) {
    if (cm.total <= 0) throw std::invalid_argument("metric_report: empty confusion matrix");
    const std::size_t c = cm.n_classes;

    MetricReport rep;
    rep.precision.assign(c, 0.0);
    rep.recall.assign(c, 0.0);
    rep.f1.assign(c, 0.0);
    rep.class_present.assign(c, false);

    std::int64_t diag = 0;
    double prec_sum = 0.0, rec_sum = 0.0, f1_sum = 0.0;
    std::size_t included = 0;
    for (std::size_t k = 0; k < c; ++k) {
        std::int64_t row = 0, col = 0;
        for (std::size_t j = 0; j < c; ++j) {
            row += cm.at(k, j);
            col += cm.at(j, k);
        }
        diag += cm.at(k, k);
        if (row == 0 && col == 0) continue;  // absent everywhere: excluded from macros

        rep.class_present[k] = true;
        ++included;
        const double tp = static_cast<double>(cm.at(k, k));
        rep.precision[k] = col > 0 ? tp / static_cast<double>(col) : 0.0;
        rep.recall[k] = row > 0 ? tp / static_cast<double>(row) : 0.0;
        const double pr = rep.precision[k] + rep.recall[k];
        rep.f1[k] = pr > 0.0 ? 2.0 * rep.precision[k] * rep.recall[k] / pr : 0.0;
        prec_sum += rep.precision[k];
        rec_sum += rep.recall[k];
        f1_sum += rep.f1[k];
    }
    if (included == 0) throw std::invalid_argument("metric_report: no class present");

    rep.accuracy = static_cast<double>(diag) / static_cast<double>(cm.total);
    rep.macro_precision = prec_sum / static_cast<double>(included);
    rep.macro_recall = rec_sum / static_cast<double>(included);
    rep.macro_f1 = f1_sum / static_cast<double>(included);
    return rep;
}

MeanStd aggregate_values(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("aggregate_values: no values");
    MeanStd out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(values.size()));
    return out;
}

AggregateReport aggregate(const std::vector<MetricReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("aggregate: no reports");
    AggregateReport agg;
    agg.repeats = static_cast<int>(reports.size());

    const auto collect = [&](const std::string& name, auto getter) {
        std::vector<double> values;
        values.reserve(reports.size());
        for (const MetricReport& r : reports) values.push_back(getter(r));
        agg.metrics[name] = aggregate_values(values);
    };
    collect("accuracy", [](const MetricReport& r) { return r.accuracy; });
    collect("macro_precision", [](const MetricReport& r) { return r.macro_precision; });
    collect("macro_recall", [](const MetricReport& r) { return r.macro_recall; });
    collect("macro_f1", [](const MetricReport& r) { return r.macro_f1; });
    return agg;
}

std::string format_percent(const MeanStd& value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f ± %.1f", 100.0 * value.mean, 100.0 * value.stddev);
    return buf;
}

}  // namespace phaselab
