#pragma once

#include <cstdint>
#include <vector>

#include "cal/dataset.hpp"

namespace cal {

/// Desk-scale stand-in for a noisily annotated cloud dataset.
struct SynthConfig {
    std::uint64_t seed = 1;
    std::size_t count = 64;
    std::size_t test_count = 16;
    std::size_t size = 64;
    double true_threshold = 70.0;  // must lie in (45, 255)
    double smoothness = 8.0;       // value-noise lattice spacing in pixels
    double gamma = 2.0;            // field = 255 * (noise / 255)^gamma; > 1 darkens the ground
    double flip_fraction = 0.15;
    int dilation_radius = 1;
    double band_jitter = 2.0;      // per-band uniform offset bound, intensity units
    std::size_t band_count = 4;
    int bit_depth = 8;

    /// Throws ConfigError on any out-of-range field.
    void validate() const;
};

struct SyntheticPatch {
    ImagePatch patch;
    IntensityMap field;      // the smooth field the bands were derived from
    Mask clean;              // binarize(field, true_threshold)
    Mask noisy;              // clean, `flipped` pixels flipped, then dilated
    std::size_t flipped = 0;
};

/// Pure function of `config`. Values are quantized to the configured bit depth so they
/// survive a PGM round trip bit-exactly.
std::vector<SyntheticPatch> generate_synthetic(const SynthConfig& config);

struct SyntheticBenchmark {
    Dataset train;  // mask = noisy, reference = clean
    Dataset test;   // mask = clean
};

/// Train split from `config`; test split of `test_count` patches from a derived seed.
SyntheticBenchmark make_benchmark(const SynthConfig& config);

}  // namespace cal
