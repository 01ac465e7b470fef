#pragma once

#include <span>
#include <vector>

#include "cal/raster.hpp"

namespace cal {

/// Equal weight on every band: the default channel reduction.
std::vector<double> uniform_weights(std::size_t band_count);

/// Weighted band mix. Weights must be non-negative, one per band, summing to 1 (within 1e-9).
/// Throws DimensionError on a count mismatch and ConfigError on invalid weights.
IntensityMap to_intensity(const ImagePatch& patch, std::span<const double> weights);

/// Pixel is cloud iff its intensity is strictly greater than `threshold`.
Mask binarize(const IntensityMap& intensity, double threshold);

/// Square-element erosion/dilation. Only in-bounds neighbours take part, which for a
/// square element is the same as replicating the border.
Mask erode(const Mask& mask, int radius);
Mask dilate(const Mask& mask, int radius);

struct MorphRadii {
    int opening = 0;
    int closing = 0;
};

/// Opening with `radii.opening`, then closing with `radii.closing`. (0, 0) is the identity.
Mask morph_clean(const Mask& mask, MorphRadii radii);

}  // namespace cal
