#pragma once

// Per-pixel counting and textbook formulas, independent of cal::accumulate/report.

#include <cstdint>
#include <vector>

namespace oracle {

struct Counts {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Counts count_pixels(const std::vector<int>& pred, const std::vector<int>& truth) {
    Counts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] == 1 && truth[i] == 1) {
            ++c.tp;
        } else if (pred[i] == 1 && truth[i] == 0) {
            ++c.fp;
        } else if (pred[i] == 0 && truth[i] == 1) {
            ++c.fn;
        } else {
            ++c.tn;
        }
    }
    return c;
}

struct Scores {
    double miou, precision, recall, f1, oa;
};

inline Scores scores(const Counts& c) {
    const auto safe = [](double n, double d) { return d == 0.0 ? 0.0 : n / d; };
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
    Scores s{};
    s.precision = safe(tp, tp + fp);
    s.recall = safe(tp, tp + fn);
    s.f1 = safe(2.0 * s.precision * s.recall, s.precision + s.recall);
    s.oa = (tp + tn) / (tp + fp + fn + tn);
    s.miou = 0.5 * (safe(tp, tp + fp + fn) + safe(tn, tn + fn + fp));
    return s;
}

}  // namespace oracle
