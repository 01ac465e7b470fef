#include "cal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "cal/binarize.hpp"
#include "cal/error.hpp"
#include "cal/random.hpp"

namespace cal {

void SynthConfig::validate() const {
    if (count == 0) throw ConfigError("synthetic count must be at least 1");
    if (size == 0) throw ConfigError("synthetic patch size must be at least 1");
    if (!(true_threshold > 45.0 && true_threshold < 255.0)) {
        throw ConfigError(fmt::format("true threshold {} outside (45, 255)", true_threshold));
    }
    if (!(smoothness > 0.0) || !std::isfinite(smoothness)) {
        throw ConfigError("smoothness must be positive");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
    if (!(flip_fraction >= 0.0 && flip_fraction <= 1.0)) {
        throw ConfigError(fmt::format("flip fraction {} outside [0, 1]", flip_fraction));
    }
    if (dilation_radius < 0) throw ConfigError("dilation radius must be non-negative");
    if (!(band_jitter >= 0.0) || !std::isfinite(band_jitter)) {
        throw ConfigError("band jitter must be non-negative");
    }
    if (band_count == 0 || band_count > default_bands().size()) {
        throw ConfigError(fmt::format("band count must be in [1, 4], got {}", band_count));
    }
    if (bit_depth != 8 && bit_depth != 16) throw ConfigError("bit depth must be 8 or 16");
}

namespace {

double quantize(double v, int bit_depth) {
    const double steps = bit_depth == 8 ? 1.0 : 257.0;
    return std::round(std::clamp(v, 0.0, kIntensityMax) * steps) / steps;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Value noise: uniform lattice values every `spacing` pixels, smoothstep-interpolated.
std::vector<double> value_noise(Rng& rng, std::size_t size, double spacing) {
    const auto cells = static_cast<std::size_t>(std::ceil(static_cast<double>(size) / spacing)) + 2;
    std::vector<double> lattice(cells * cells);
    for (double& v : lattice) v = rng.uniform(0.0, kIntensityMax);

    std::vector<double> out(size * size);
    for (std::size_t y = 0; y < size; ++y) {
        const double fy = static_cast<double>(y) / spacing;
        const auto iy = static_cast<std::size_t>(fy);
        const double ty = smoothstep(fy - static_cast<double>(iy));
        for (std::size_t x = 0; x < size; ++x) {
            const double fx = static_cast<double>(x) / spacing;
            const auto ix = static_cast<std::size_t>(fx);
            const double tx = smoothstep(fx - static_cast<double>(ix));
            const auto at = [&](std::size_t cx, std::size_t cy) { return lattice[cy * cells + cx]; };
            const double top = at(ix, iy) + tx * (at(ix + 1, iy) - at(ix, iy));
            const double bottom = at(ix, iy + 1) + tx * (at(ix + 1, iy + 1) - at(ix, iy + 1));
            out[y * size + x] = top + ty * (bottom - top);
        }
    }
    return out;
}

SyntheticPatch make_patch(const SynthConfig& cfg, std::uint64_t index) {
    Rng rng(mix_seed(cfg.seed, index));
    const std::size_t n = cfg.size * cfg.size;

    std::vector<double> field = value_noise(rng, cfg.size, cfg.smoothness);
    for (double& v : field) v = quantize(kIntensityMax * std::pow(v / kIntensityMax, cfg.gamma), cfg.bit_depth);

    const auto bands_all = default_bands();
    std::vector<Band> bands(bands_all.begin(), bands_all.begin() + static_cast<std::ptrdiff_t>(cfg.band_count));
    std::vector<std::vector<double>> data(cfg.band_count, field);
    if (cfg.band_jitter > 0.0) {
        for (auto& band : data) {
            for (double& v : band) v = quantize(v + rng.uniform(-cfg.band_jitter, cfg.band_jitter), cfg.bit_depth);
        }
    }

    IntensityMap intensity(cfg.size, cfg.size, field);
    Mask clean = binarize(intensity, cfg.true_threshold);

    // Flip exactly round(p * n) distinct pixels (partial Fisher-Yates), then dilate.
    const auto flips = static_cast<std::size_t>(std::llround(cfg.flip_fraction * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::uint8_t> noisy(clean.values().begin(), clean.values().end());
    for (std::size_t i = 0; i < flips; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(order[i], order[j]);
        noisy[order[i]] ^= 1;
    }
    Mask noisy_mask = dilate(Mask(cfg.size, cfg.size, std::move(noisy)), cfg.dilation_radius);

    return SyntheticPatch{ImagePatch(cfg.size, cfg.size, std::move(bands), std::move(data)),
                          std::move(intensity), std::move(clean), std::move(noisy_mask), flips};
}

}  // namespace

std::vector<SyntheticPatch> generate_synthetic(const SynthConfig& config) {
    config.validate();
    std::vector<SyntheticPatch> out;
    out.reserve(config.count);
    for (std::size_t i = 0; i < config.count; ++i) out.push_back(make_patch(config, i));
    return out;
}

SyntheticBenchmark make_benchmark(const SynthConfig& config) {
    config.validate();
    SyntheticBenchmark bench;
    const auto bands_all = default_bands();
    const std::vector<Band> bands(bands_all.begin(),
                                  bands_all.begin() + static_cast<std::ptrdiff_t>(config.band_count));
    bench.train = Dataset{Split::Train, bands, config.bit_depth, {}};
    bench.test = Dataset{Split::Test, bands, config.bit_depth, {}};

    std::size_t i = 0;
    for (auto& p : generate_synthetic(config)) {
        bench.train.samples.push_back(
            Sample{fmt::format("train_{:04d}", i++), std::move(p.patch), std::move(p.noisy), std::move(p.clean)});
    }
    if (config.test_count > 0) {
        SynthConfig test_cfg = config;
        test_cfg.seed = mix_seed(config.seed, 0x7e57);
        test_cfg.count = config.test_count;
        i = 0;
        for (auto& p : generate_synthetic(test_cfg)) {
            bench.test.samples.push_back(
                Sample{fmt::format("test_{:04d}", i++), std::move(p.patch), std::move(p.clean), std::nullopt});
        }
    }
    return bench;
}

}  // namespace cal
