#include "marketdef/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "marketdef/csv.hpp"

namespace marketdef {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kMargin = 56;

constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
};

std::string pct_label(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
    return buf;
}

struct Scale {
    double lo, hi;
    double px0, px1;
    double at(double v) const {
        const double span = hi - lo;
        if (span <= 0.0) return 0.5 * (px0 + px1);
        return px0 + (v - lo) / span * (px1 - px0);
    }
};

} // namespace

std::string render_cluster_svg(const Matrix& scores, const std::vector<int>& labels,
                               const std::array<double, 2>& variance_explained) {
    const std::size_t n = scores.rows();
    if (scores.cols() != 2) throw DimensionError("svg: scores must be n x 2");
    if (labels.size() != n) throw DimensionError("svg: label count mismatch");
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < 2; ++c)
            if (!std::isfinite(scores(r, c))) throw DomainError("svg: non-finite score");

    double xlo = scores(0, 0), xhi = scores(0, 0);
    double ylo = scores(0, 1), yhi = scores(0, 1);
    for (std::size_t r = 0; r < n; ++r) {
        xlo = std::min(xlo, scores(r, 0));
        xhi = std::max(xhi, scores(r, 0));
        ylo = std::min(ylo, scores(r, 1));
        yhi = std::max(yhi, scores(r, 1));
    }
    const double xpad = (xhi - xlo) * 0.05;
    const double ypad = (yhi - ylo) * 0.05;
    // SVG y runs downward; flip so larger components plot higher.
    const Scale sx{xlo - xpad, xhi + xpad, kMargin, kWidth - kMargin};
    const Scale sy{ylo - ypad, yhi + ypad, kHeight - kMargin, kMargin};

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
           "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
           std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
    out += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Axes.
    const std::string m = std::to_string(kMargin);
    const std::string w = std::to_string(kWidth - kMargin);
    const std::string h = std::to_string(kHeight - kMargin);
    out += "  <line x1=\"" + m + "\" y1=\"" + h + "\" x2=\"" + w + "\" y2=\"" + h +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out += "  <line x1=\"" + m + "\" y1=\"" + std::to_string(kMargin) + "\" x2=\"" + m +
           "\" y2=\"" + h + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out += "  <text x=\"" + std::to_string(kWidth / 2) + "\" y=\"" +
           std::to_string(kHeight - 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">PC1 (" +
           pct_label(variance_explained[0]) + ")</text>\n";
    out += "  <text x=\"18\" y=\"" + std::to_string(kHeight / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 18 " +
           std::to_string(kHeight / 2) + ")\">PC2 (" + pct_label(variance_explained[1]) +
           ")</text>\n";

    for (std::size_t r = 0; r < n; ++r) {
        const int l = labels[r];
        const char* color = kPalette[static_cast<std::size_t>(l < 0 ? 0 : l) % kPalette.size()];
        out += "  <circle cx=\"" + format_double(sx.at(scores(r, 0))) + "\" cy=\"" +
               format_double(sy.at(scores(r, 1))) + "\" r=\"4\" fill=\"" + color +
               "\" fill-opacity=\"0.85\" stroke=\"#222222\" stroke-width=\"0.5\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

void emit_svg(const Matrix& scores, const std::vector<int>& labels,
              const std::array<double, 2>& variance_explained,
              const std::filesystem::path& out) {
    const std::string body = render_cluster_svg(scores, labels, variance_explained);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw IoError("svg: cannot open " + out.string() + " for writing");
    f << body;
    if (!f) throw IoError("svg: write failed for " + out.string());
}

} // namespace marketdef
