#include "phaselab/svg_report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace phaselab {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void write_file(const std::filesystem::path& out, const std::string& body) {
    std::ofstream os(out, std::ios::trunc);
    if (!os) throw std::runtime_error("svg: cannot open " + out.string());
    os << body;
    if (!os) throw std::runtime_error("svg: write failed for " + out.string());
}

void append_ribbon(std::ostringstream& svg, const TagSequence& tags, double x0, double y0,
                   double width, double height) {
    const double dx = width / static_cast<double>(tags.size());
    std::size_t start = 0;
    for (std::size_t t = 1; t <= tags.size(); ++t) {
        if (t == tags.size() || tags[t] != tags[start]) {
            const auto& palette = phase_palette();
            const std::string& color = palette[static_cast<std::size_t>(tags[start]) % palette.size()];
            svg << "<rect x=\"" << num(x0 + dx * static_cast<double>(start)) << "\" y=\"" << num(y0)
                << "\" width=\"" << num(dx * static_cast<double>(t - start)) << "\" height=\""
                << num(height) << "\" fill=\"" << color << "\"/>\n";
            start = t;
        }
    }
}

}  // namespace

const std::vector<std::string>& phase_palette() {
    static const std::vector<std::string> colors = {
        "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1",
    };
    return colors;
}

void render_timeline(const TagSequence& truth,
                     const std::map<std::string, TagSequence>& predictions,
                     std::size_t n_classes, const std::filesystem::path& out) {
    if (truth.empty()) throw std::invalid_argument("render_timeline: empty truth sequence");
    for (const auto& [name, tags] : predictions) {
        if (tags.size() != truth.size()) {
            throw std::invalid_argument("render_timeline: length mismatch for variant " + name);
        }
    }

    const double label_w = 120, ribbon_w = 720, ribbon_h = 24, gap = 8, legend_h = 30;
    const double width = label_w + ribbon_w + 20;
    const double height = legend_h + (ribbon_h + gap) * static_cast<double>(1 + predictions.size()) + 10;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";

    const auto& palette = phase_palette();
    for (std::size_t k = 0; k < n_classes; ++k) {
        const double x = label_w + static_cast<double>(k) * 70.0;
        svg << "<rect x=\"" << num(x) << "\" y=\"8\" width=\"14\" height=\"14\" fill=\""
            << palette[k % palette.size()] << "\"/>\n";
        svg << "<text x=\"" << num(x + 18) << "\" y=\"20\">P" << k + 1 << "</text>\n";
    }

    double y = legend_h;
    svg << "<text x=\"4\" y=\"" << num(y + ribbon_h - 8) << "\">truth</text>\n";
    append_ribbon(svg, truth, label_w, y, ribbon_w, ribbon_h);
    for (const auto& [name, tags] : predictions) {
        y += ribbon_h + gap;
        svg << "<text x=\"4\" y=\"" << num(y + ribbon_h - 8) << "\">" << name << "</text>\n";
        append_ribbon(svg, tags, label_w, y, ribbon_w, ribbon_h);
    }
    svg << "</svg>\n";
    write_file(out, svg.str());
}

namespace {

void append_panel(std::ostringstream& svg, const std::vector<SummaryPoint>& points,
                  const std::string& metric, const std::string& title, double x0, double y0,
                  double w, double h) {
    std::vector<int> sizes;
    std::vector<std::string> variants;
    for (const SummaryPoint& p : points) {
        if (p.metric != metric) continue;
        if (std::find(sizes.begin(), sizes.end(), p.size) == sizes.end()) sizes.push_back(p.size);
        if (std::find(variants.begin(), variants.end(), p.variant) == variants.end()) {
            variants.push_back(p.variant);
        }
    }
    std::sort(sizes.begin(), sizes.end());
    std::sort(variants.begin(), variants.end());

    svg << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(w)
        << "\" height=\"" << num(h) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    svg << "<text x=\"" << num(x0 + 4) << "\" y=\"" << num(y0 - 6) << "\">" << title << "</text>\n";

    const auto x_of = [&](int size) {
        const auto idx = static_cast<double>(
            std::find(sizes.begin(), sizes.end(), size) - sizes.begin());
        const double denom = sizes.size() > 1 ? static_cast<double>(sizes.size() - 1) : 1.0;
        return x0 + 30 + (w - 60) * idx / denom;
    };
    const auto y_of = [&](double value) { return y0 + h - value * h; };

    for (int size : sizes) {
        svg << "<text x=\"" << num(x_of(size) - 4) << "\" y=\"" << num(y0 + h + 14) << "\">" << size
            << "</text>\n";
    }

    const auto& palette = phase_palette();
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        const std::string& color = palette[vi % palette.size()];
        std::ostringstream line;
        int n_points = 0;
        for (int size : sizes) {
            for (const SummaryPoint& p : points) {
                if (p.metric != metric || p.variant != variants[vi] || p.size != size) continue;
                const double x = x_of(size), ym = y_of(p.mean);
                line << (n_points > 0 ? " " : "") << num(x) << "," << num(ym);
                ++n_points;
                const double lo = y_of(std::max(0.0, p.mean - p.stddev));
                const double hi = y_of(std::min(1.0, p.mean + p.stddev));
                svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(lo) << "\" x2=\"" << num(x)
                    << "\" y2=\"" << num(hi) << "\" stroke=\"" << color << "\"/>\n";
                svg << "<circle cx=\"" << num(x) << "\" cy=\"" << num(ym)
                    << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
            }
        }
        if (n_points >= 2) {  // a lone point stays a marker
            svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color
                << "\"/>\n";
        }
        svg << "<text x=\"" << num(x0 + w - 80) << "\" y=\""
            << num(y0 + 16 + 14 * static_cast<double>(vi)) << "\" fill=\"" << color << "\">"
            << variants[vi] << "</text>\n";
    }
}

}  // namespace

void render_curves(const std::vector<SummaryPoint>& points, const std::filesystem::path& out) {
    if (points.empty()) throw std::invalid_argument("render_curves: no points");
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" height=\"360\" "
           "font-family=\"sans-serif\" font-size=\"11\">\n";
    append_panel(svg, points, "accuracy", "accuracy vs annotated sequences", 30, 30, 370, 280);
    append_panel(svg, points, "macro_f1", "macro F1 vs annotated sequences", 440, 30, 370, 280);
    svg << "</svg>\n";
    write_file(out, svg.str());
}

}  // namespace phaselab
