#include "cal/cli/plot.hpp"

#include <algorithm>
#include <vector>

#include <fmt/core.h>

#include "cal/error.hpp"

namespace cal::cli {
namespace {

constexpr double kWidth = 720.0;
constexpr double kPanelHeight = 220.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 40.0;

struct Series {
    std::string title;
    std::string x_label;
    std::string color;
    std::vector<double> xs;
    std::vector<double> ys;
};

std::string panel(const Series& s, double top) {
    auto [xmin_it, xmax_it] = std::minmax_element(s.xs.begin(), s.xs.end());
    auto [ymin_it, ymax_it] = std::minmax_element(s.ys.begin(), s.ys.end());
    double xmin = *xmin_it, xmax = *xmax_it, ymin = *ymin_it, ymax = *ymax_it;
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kPanelHeight - kMarginTop - kMarginBottom;
    const double x0 = kMarginLeft;
    const double y0 = top + kMarginTop;
    const auto px = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * plot_w; };
    const auto py = [&](double y) { return y0 + plot_h - (y - ymin) / (ymax - ymin) * plot_h; };

    std::string out = fmt::format("<g>\n<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"14\">{}</text>\n",
                                  x0, top + 20.0, s.title);
    out += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
        "stroke=\"#888\"/>\n",
        x0, y0, plot_w, plot_h);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.4g}</text>\n",
                       x0 - 6.0, y0 + 10.0, ymax);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.4g}</text>\n",
                       x0 - 6.0, y0 + plot_h, ymin);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\">{:.4g}</text>\n", x0,
                       y0 + plot_h + 16.0, xmin);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.4g}</text>\n",
                       x0 + plot_w, y0 + plot_h + 16.0, xmax);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
                       x0 + plot_w / 2.0, y0 + plot_h + 30.0, s.x_label);
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"", s.color);
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
        out += fmt::format("{}{:.2f},{:.2f}", i == 0 ? "" : " ", px(s.xs[i]), py(s.ys[i]));
    }
    out += "\"/>\n</g>\n";
    return out;
}

}  // namespace

std::string render_training_svg(std::span<const HistoryRecord> records,
                                std::span<const EvalSnapshot> snapshots) {
    if (records.empty()) throw IoError("training history has no records to plot");

    std::vector<Series> series;
    Series loss{"training loss", "step", "#1f77b4", {}, {}};
    for (const auto& r : records) {
        loss.xs.push_back(static_cast<double>(r.step));
        loss.ys.push_back(r.loss);
    }
    series.push_back(std::move(loss));

    Series threshold{"threshold", "step", "#d62728", {}, {}};
    for (const auto& r : records) {
        if (r.threshold) {
            threshold.xs.push_back(static_cast<double>(r.step));
            threshold.ys.push_back(*r.threshold);
        }
    }
    if (!threshold.xs.empty()) series.push_back(std::move(threshold));

    if (!snapshots.empty()) {
        Series precision{"held-out precision", "epoch", "#2ca02c", {}, {}};
        for (const auto& s : snapshots) {
            precision.xs.push_back(static_cast<double>(s.epoch));
            precision.ys.push_back(s.metrics.precision);
        }
        series.push_back(std::move(precision));
    }

    const double height = kPanelHeight * static_cast<double>(series.size());
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
        "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\">\n",
        kWidth, height, kWidth, height);
    out += fmt::format("<rect width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", kWidth, height);
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += panel(series[i], kPanelHeight * static_cast<double>(i));
    }
    out += "</svg>\n";
    return out;
}

}  // namespace cal::cli
