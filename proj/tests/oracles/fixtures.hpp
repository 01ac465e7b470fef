#pragma once

// Random instance builders shared by the unit and acceptance suites.

#include <cmath>
#include <vector>

#include "cal/model.hpp"
#include "cal/random.hpp"
#include "cal/raster.hpp"

namespace fixtures {

inline cal::ImagePatch random_patch(cal::Rng& rng, std::size_t w, std::size_t h, std::size_t bands) {
    const auto all = cal::default_bands();
    std::vector<cal::Band> ids(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(bands));
    std::vector<std::vector<double>> data(bands, std::vector<double>(w * h));
    for (auto& band : data) {
        for (double& v : band) v = rng.uniform(0.0, 255.0);
    }
    return cal::ImagePatch(w, h, ids, data);
}

inline cal::Mask random_mask(cal::Rng& rng, std::size_t w, std::size_t h, double p = 0.5) {
    std::vector<std::uint8_t> v(w * h);
    for (auto& x : v) x = rng.uniform() < p ? 1 : 0;
    return cal::Mask(w, h, v);
}

inline cal::IntensityMap random_intensity(cal::Rng& rng, std::size_t w, std::size_t h) {
    std::vector<double> v(w * h);
    for (double& x : v) x = rng.uniform(0.0, 255.0);
    return cal::IntensityMap(w, h, v);
}

/// Model with random weights of scale `scale` and normalization fitted on `patch`.
inline cal::SegModel random_model(cal::Rng& rng, int window, const cal::ImagePatch& patch,
                                  double scale = 0.3) {
    cal::SegModel model(window, patch.band_count());
    cal::fit_normalization(model, std::span(&patch, 1));
    for (double& w : model.weights()) w = rng.uniform(-scale, scale);
    model.set_bias(rng.uniform(-0.5, 0.5));
    return model;
}

/// Frozen model emitting sigmoid((mean band intensity - center) / slope): a 1x1 window
/// with identity normalization.
inline cal::SegModel sigmoid_of_intensity(std::size_t bands, double center, double slope) {
    cal::SegModel model(1, bands);
    for (double& w : model.weights()) w = 1.0 / (slope * static_cast<double>(bands));
    model.set_bias(-center / slope);
    return model;
}

}  // namespace fixtures
