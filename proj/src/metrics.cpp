#include "cal/metrics.hpp"

#include <fmt/core.h>

#include "cal/error.hpp"

namespace cal {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    tn += other.tn;
    return *this;
}

ConfusionMatrix operator+(ConfusionMatrix a, const ConfusionMatrix& b) { return a += b; }

ConfusionMatrix accumulate(ConfusionMatrix cm, const Mask& pred, const Mask& truth) {
    if (!pred.same_shape(truth)) {
        throw DimensionError(fmt::format("prediction {}x{} vs truth {}x{}", pred.width(),
                                         pred.height(), truth.width(), truth.height()));
    }
    // Outcome index: 2 * pred + truth -> tn, fn, fp, tp.
    std::uint64_t counts[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < pred.size(); ++i) ++counts[2 * pred[i] + truth[i]];
    cm.tn += counts[0];
    cm.fn += counts[1];
    cm.fp += counts[2];
    cm.tp += counts[3];
    return cm;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den, std::uint8_t flag, std::uint8_t& degenerate) {
    if (den == 0) {
        degenerate |= flag;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport report(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw EmptyEvaluationError("no pixels were evaluated");
    MetricsReport r;
    r.precision = ratio(cm.tp, cm.tp + cm.fp, MetricsReport::kPrecision, r.degenerate);
    r.recall = ratio(cm.tp, cm.tp + cm.fn, MetricsReport::kRecall, r.degenerate);
    if (r.precision + r.recall > 0.0) {
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    } else {
        r.degenerate |= MetricsReport::kF1;
    }
    r.oa = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    r.cloud_iou = ratio(cm.tp, cm.tp + cm.fp + cm.fn, MetricsReport::kCloudIou, r.degenerate);
    r.clear_iou = ratio(cm.tn, cm.tn + cm.fn + cm.fp, MetricsReport::kClearIou, r.degenerate);
    r.miou = 0.5 * (r.cloud_iou + r.clear_iou);
    return r;
}

std::string format_table_row(const MetricsReport& r) {
    return fmt::format("{:.2f} {:.2f} {:.2f} {:.2f} {:.2f}", 100.0 * r.miou, 100.0 * r.precision,
                       100.0 * r.recall, 100.0 * r.f1, 100.0 * r.oa);
}

}  // namespace cal
