#ifndef PHASELAB_SVG_REPORT_HPP
#define PHASELAB_SVG_REPORT_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "phaselab/crf.hpp"

namespace phaselab {

// Phase color palette; index modulo the palette size.
const std::vector<std::string>& phase_palette();

// Horizontal ribbon per variant (ground truth on top), one colored run per
// phase segment, with a legend. Output bytes are a pure function of the
// inputs.
void render_timeline(const TagSequence& truth,
                     const std::map<std::string, TagSequence>& predictions,
                     std::size_t n_classes, const std::filesystem::path& out);

struct SummaryPoint {
    int size = 0;
    std::string variant;
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;
};

// Accuracy and macro-F1 versus annotation budget, one polyline per variant
// with ±std whiskers. Deterministic bytes for fixed input.
void render_curves(const std::vector<SummaryPoint>& points, const std::filesystem::path& out);

}  // namespace phaselab

#endif
