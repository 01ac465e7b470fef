#include <doctest.h>

#include <cmath>

#include "cal/binarize.hpp"
#include "cal/error.hpp"
#include "oracles/brute_morph.hpp"
#include "oracles/fixtures.hpp"

using namespace cal;

namespace {

Mask mask_of(const oracle::Grid& g) {
    std::vector<std::uint8_t> v;
    for (const auto& row : g) {
        for (int x : row) v.push_back(static_cast<std::uint8_t>(x));
    }
    return Mask(g[0].size(), g.size(), v);
}

oracle::Grid grid_of(const Mask& m) {
    oracle::Grid g(m.height(), std::vector<int>(m.width()));
    for (std::size_t y = 0; y < m.height(); ++y) {
        for (std::size_t x = 0; x < m.width(); ++x) g[y][x] = m(x, y);
    }
    return g;
}

}  // namespace

TEST_CASE("raster invariants are enforced at construction") {
    CHECK_THROWS_AS(ImagePatch(2, 1, {Band::Red}, {{0.0, 256.0}}), ConfigError);
    CHECK_THROWS_AS(ImagePatch(2, 1, {Band::Red}, {{0.0, NAN}}), ConfigError);
    CHECK_THROWS_AS(ImagePatch(2, 1, {Band::Red, Band::Green}, {{0.0, 1.0}, {0.0}}), DimensionError);
    CHECK_THROWS_AS(ImagePatch(0, 1, {Band::Red}, {{}}), DimensionError);
    CHECK_THROWS_AS(ImagePatch(1, 1, {}, {}), DimensionError);
    CHECK_THROWS_AS(Mask(1, 1, std::vector<std::uint8_t>{2}), ConfigError);
    CHECK_THROWS_AS(IntensityMap(1, 1, {-1.0}), ConfigError);
    CHECK_THROWS_AS(Mask(2, 2, std::vector<std::uint8_t>{1, 0, 1}), DimensionError);
}

TEST_CASE("band names round-trip") {
    for (Band b : default_bands()) CHECK(parse_band(band_name(b)) == b);
    CHECK_THROWS_AS(parse_band("swir"), ConfigError);
}

TEST_CASE("to_intensity examples") {
    SUBCASE("single band with unit weight copies the band") {
        const ImagePatch p(2, 2, {Band::Nir}, {{1.0, 2.5, 200.0, 0.0}});
        const std::vector<double> w{1.0};
        const IntensityMap m = to_intensity(p, w);
        CHECK(std::vector<double>(m.values().begin(), m.values().end()) ==
              std::vector<double>{1.0, 2.5, 200.0, 0.0});
    }
    SUBCASE("four constant bands with uniform weights") {
        const ImagePatch p(3, 2, default_bands(), std::vector<std::vector<double>>(4, std::vector<double>(6, 80.0)));
        const IntensityMap m = to_intensity(p, uniform_weights(4));
        for (double v : m.values()) CHECK(v == 80.0);
    }
    SUBCASE("two-band mix") {
        const ImagePatch p(1, 1, {Band::Red, Band::Green}, {{100.0}, {40.0}});
        const std::vector<double> w{0.5, 0.5};
        CHECK(to_intensity(p, w)(0, 0) == doctest::Approx(70.0).epsilon(1e-15));
    }
}

TEST_CASE("to_intensity rejects bad weights") {
    const ImagePatch p(1, 1, {Band::Red, Band::Green}, {{100.0}, {40.0}});
    CHECK_THROWS_AS(to_intensity(p, std::vector<double>{1.0}), DimensionError);
    CHECK_THROWS_AS(to_intensity(p, std::vector<double>{1.5, -0.5}), ConfigError);
    CHECK_THROWS_AS(to_intensity(p, std::vector<double>{0.5, 0.6}), ConfigError);
    CHECK_NOTHROW(to_intensity(p, std::vector<double>{0.5, 0.5 + 5e-10}));
}

TEST_CASE("to_intensity is linear under convex combination") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t bands = 1 + rng.below(4);
        const ImagePatch a = fixtures::random_patch(rng, 5, 4, bands);
        const ImagePatch b = fixtures::random_patch(rng, 5, 4, bands);
        std::vector<double> w(bands);
        double total = 0.0;
        for (double& x : w) total += (x = rng.uniform(0.01, 1.0));
        for (double& x : w) x /= total;
        const double alpha = rng.uniform();

        std::vector<std::vector<double>> mixed(bands, std::vector<double>(20));
        for (std::size_t k = 0; k < bands; ++k) {
            for (std::size_t i = 0; i < 20; ++i) {
                mixed[k][i] = alpha * a.band(k)[i] + (1.0 - alpha) * b.band(k)[i];
            }
        }
        const ImagePatch m(5, 4, a.bands(), mixed);
        const IntensityMap im = to_intensity(m, w);
        const IntensityMap ia = to_intensity(a, w);
        const IntensityMap ib = to_intensity(b, w);
        for (std::size_t i = 0; i < 20; ++i) {
            CHECK(std::abs(im[i] - (alpha * ia[i] + (1.0 - alpha) * ib[i])) < 1e-9);
        }
    }
}

TEST_CASE("binarize uses a strict inequality") {
    const IntensityMap m(2, 2, {70.0, 50.0, 60.0, 61.0});
    const Mask out = binarize(m, 60.0);
    CHECK(out == Mask(2, 2, std::vector<std::uint8_t>{1, 0, 0, 1}));

    Rng rng(3);
    CHECK(binarize(fixtures::random_intensity(rng, 7, 7), 255.0).count_positive() == 0);
    CHECK(binarize(IntensityMap(1, 1, {45.0}), 45.0)[0] == 0);
    CHECK_THROWS_AS(binarize(m, INFINITY), ConfigError);
    CHECK_THROWS_AS(binarize(m, NAN), ConfigError);
}

TEST_CASE("binarize is monotone in the threshold") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const IntensityMap m = fixtures::random_intensity(rng, 6, 5);
        double t1 = rng.uniform(0.0, 255.0);
        double t2 = rng.uniform(0.0, 255.0);
        if (t1 > t2) std::swap(t1, t2);
        const Mask lo = binarize(m, t1);
        const Mask hi = binarize(m, t2);
        for (std::size_t i = 0; i < m.size(); ++i) CHECK(hi[i] <= lo[i]);
    }
}

TEST_CASE("re-binarizing a 0/255 mask reproduces it") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const Mask mask = fixtures::random_mask(rng, 9, 4);
        std::vector<double> scaled;
        for (auto v : mask.values()) scaled.push_back(v * 255.0);
        const double t = rng.uniform(1e-9, 255.0 - 1e-9);
        CHECK(binarize(IntensityMap(9, 4, scaled), t) == mask);
    }
}

TEST_CASE("morph_clean examples") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Mask m = fixtures::random_mask(rng, 1 + rng.below(9), 1 + rng.below(9));
        CHECK(morph_clean(m, {0, 0}) == m);
    }
    const Mask ones(5, 5, std::uint8_t{1});
    CHECK(morph_clean(ones, {1, 1}) == ones);

    Mask speck(5, 5, std::uint8_t{0});
    std::vector<std::uint8_t> v(25, 0);
    v[12] = 1;
    speck = Mask(5, 5, v);
    CHECK(morph_clean(speck, {1, 0}).count_positive() == 0);

    CHECK_THROWS_AS(morph_clean(ones, {-1, 0}), ConfigError);
}

TEST_CASE("erosion and dilation match the direct definition") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const Mask m = fixtures::random_mask(rng, 1 + rng.below(12), 1 + rng.below(12), rng.uniform());
        const int r = static_cast<int>(rng.below(3));
        const oracle::Grid g = grid_of(m);
        CHECK(erode(m, r) == mask_of(oracle::morph(g, r, false)));
        CHECK(dilate(m, r) == mask_of(oracle::morph(g, r, true)));
        const int open_r = static_cast<int>(rng.below(3));
        const int close_r = static_cast<int>(rng.below(3));
        CHECK(morph_clean(m, {open_r, close_r}) == mask_of(oracle::opening_then_closing(g, open_r, close_r)));
    }
}
