#pragma once

#include <cstdint>
#include <string>

#include "cal/raster.hpp"

namespace cal {

/// Pixel counts with cloud as the positive class.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix operator+(ConfusionMatrix a, const ConfusionMatrix& b);

/// Adds the per-pixel outcomes of `pred` against `truth`. Throws DimensionError on a
/// shape mismatch.
ConfusionMatrix accumulate(ConfusionMatrix cm, const Mask& pred, const Mask& truth);

/// Every field is in [0, 1]. A ratio whose denominator is zero is reported as 0 and
/// recorded in `degenerate`.
struct MetricsReport {
    double miou = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double oa = 0.0;
    double cloud_iou = 0.0;
    double clear_iou = 0.0;

    enum Flag : std::uint8_t {
        kPrecision = 1 << 0,
        kRecall = 1 << 1,
        kF1 = 1 << 2,
        kCloudIou = 1 << 3,
        kClearIou = 1 << 4,
    };
    std::uint8_t degenerate = 0;

    bool operator==(const MetricsReport&) const = default;
};

/// mIoU is the mean of the cloud and clear IoU. Throws EmptyEvaluationError when the
/// matrix holds no pixels.
MetricsReport report(const ConfusionMatrix& cm);

/// "mIoU Precision Recall F1 OA" on the x100 scale, two decimals each.
std::string format_table_row(const MetricsReport& r);

}  // namespace cal
