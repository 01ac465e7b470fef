#include "cal/binarize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "cal/error.hpp"

namespace cal {

std::vector<double> uniform_weights(std::size_t band_count) {
    if (band_count == 0) throw DimensionError("cannot build weights for zero bands");
    return std::vector<double>(band_count, 1.0 / static_cast<double>(band_count));
}

IntensityMap to_intensity(const ImagePatch& patch, std::span<const double> weights) {
    if (weights.size() != patch.band_count()) {
        throw DimensionError(fmt::format("{} weights supplied for a {}-band patch", weights.size(),
                                         patch.band_count()));
    }
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw ConfigError(fmt::format("band weight {} is negative or non-finite", w));
        }
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError(fmt::format("band weights sum to {}, expected 1", total));
    }

    std::vector<double> out(patch.pixel_count(), 0.0);
    for (std::size_t b = 0; b < patch.band_count(); ++b) {
        const auto band = patch.band(b);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights[b] * band[i];
    }
    // A weight sum of 1 +- 1e-9 can overshoot the range by a rounding hair.
    for (double& v : out) v = std::clamp(v, 0.0, kIntensityMax);
    return IntensityMap(patch.width(), patch.height(), std::move(out));
}

Mask binarize(const IntensityMap& intensity, double threshold) {
    if (!std::isfinite(threshold)) throw ConfigError("binarization threshold must be finite");
    const auto values = intensity.values();
    std::vector<std::uint8_t> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(),
                   [threshold](double v) { return static_cast<std::uint8_t>(v > threshold); });
    return Mask(intensity.width(), intensity.height(), std::move(out));
}

namespace {

// Separable square-window min (erosion) or max (dilation) over in-bounds neighbours.
Mask square_filter(const Mask& mask, int radius, bool take_max) {
    if (radius < 0) throw ConfigError(fmt::format("morphology radius {} is negative", radius));
    if (radius == 0) return mask;

    const auto w = static_cast<std::ptrdiff_t>(mask.width());
    const auto h = static_cast<std::ptrdiff_t>(mask.height());
    const auto reduce = [take_max](std::uint8_t acc, std::uint8_t v) {
        return take_max ? std::max(acc, v) : std::min(acc, v);
    };
    const std::uint8_t init = take_max ? 0 : 1;

    std::vector<std::uint8_t> rows(mask.size());
    for (std::ptrdiff_t y = 0; y < h; ++y) {
        for (std::ptrdiff_t x = 0; x < w; ++x) {
            std::uint8_t acc = init;
            for (auto xx = std::max<std::ptrdiff_t>(0, x - radius);
                 xx <= std::min(w - 1, x + radius); ++xx) {
                acc = reduce(acc, mask(static_cast<std::size_t>(xx), static_cast<std::size_t>(y)));
            }
            rows[static_cast<std::size_t>(y * w + x)] = acc;
        }
    }
    std::vector<std::uint8_t> out(mask.size());
    for (std::ptrdiff_t y = 0; y < h; ++y) {
        for (std::ptrdiff_t x = 0; x < w; ++x) {
            std::uint8_t acc = init;
            for (auto yy = std::max<std::ptrdiff_t>(0, y - radius);
                 yy <= std::min(h - 1, y + radius); ++yy) {
                acc = reduce(acc, rows[static_cast<std::size_t>(yy * w + x)]);
            }
            out[static_cast<std::size_t>(y * w + x)] = acc;
        }
    }
    return Mask(mask.width(), mask.height(), std::move(out));
}

}  // namespace

Mask erode(const Mask& mask, int radius) { return square_filter(mask, radius, false); }

Mask dilate(const Mask& mask, int radius) { return square_filter(mask, radius, true); }

Mask morph_clean(const Mask& mask, MorphRadii radii) {
    if (radii.opening < 0 || radii.closing < 0) {
        throw ConfigError("morphology radii must be non-negative");
    }
    Mask out = dilate(erode(mask, radii.opening), radii.opening);
    return erode(dilate(out, radii.closing), radii.closing);
}

}  // namespace cal
