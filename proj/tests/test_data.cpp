#include <doctest.h>

#include <cmath>

#include "cal/binarize.hpp"
#include "cal/dataset.hpp"
#include "cal/error.hpp"
#include "cal/pgm.hpp"
#include "cal/synthetic.hpp"
#include "oracles/fixtures.hpp"
#include "oracles/tempdir.hpp"

using namespace cal;
using fixtures::TempDir;

namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

SynthConfig small_synth() {
    SynthConfig cfg;
    cfg.count = 3;
    cfg.test_count = 2;
    cfg.size = 16;
    return cfg;
}

}  // namespace

TEST_CASE("PGM P5 encoding is byte-exact") {
    const PgmImage img{3, 2, 255, {0, 1, 2, 253, 254, 255}};
    const auto bytes = encode_pgm(img);
    std::vector<std::uint8_t> expected = bytes_of("P5\n3 2\n255\n");
    for (auto s : img.samples) expected.push_back(static_cast<std::uint8_t>(s));
    CHECK(bytes == expected);
    CHECK(decode_pgm(bytes) == img);
}

TEST_CASE("16-bit PGM samples are big-endian and normalize by 257") {
    const PgmImage img{2, 1, 65535, {257, 65535}};
    const auto bytes = encode_pgm(img);
    CHECK(bytes.size() == std::string("P5\n2 1\n65535\n").size() + 4);
    CHECK(bytes[bytes.size() - 4] == 0x01);
    CHECK(bytes[bytes.size() - 3] == 0x01);
    CHECK(decode_pgm(bytes) == img);
    const auto norm = normalized_samples(img);
    CHECK(norm[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(norm[1] == 255.0);
}

TEST_CASE("P2 and header comments parse") {
    const auto img = decode_pgm(bytes_of("P2\n# made by hand\n2 2 # dims\n15\n0 5\n10 15\n"));
    CHECK(img == PgmImage{2, 2, 15, {0, 5, 10, 15}});
    const auto p5 = decode_pgm(bytes_of("P5 #c\n1 1\n#c\n255\n\x07"));
    CHECK(p5.samples == std::vector<std::uint16_t>{7});
}

TEST_CASE("malformed PGM data is rejected") {
    CHECK_THROWS_AS(decode_pgm(bytes_of("P6\n1 1\n255\n\x01\x02\x03")), IoError);
    CHECK_THROWS_AS(decode_pgm(bytes_of("P5\n2 2\n255\n\x01")), IoError);
    CHECK_THROWS_AS(decode_pgm(bytes_of("P2\n1 1\n10\n11\n")), IoError);
    CHECK_THROWS_AS(decode_pgm(bytes_of("P5\n0 1\n255\n")), IoError);
    CHECK_THROWS_AS(read_pgm("/nonexistent/file.pgm"), IoError);
}

TEST_CASE("mask PGMs must be binary") {
    CHECK(mask_from_pgm({2, 1, 255, {0, 255}}) == Mask(2, 1, std::vector<std::uint8_t>{0, 1}));
    CHECK(mask_from_pgm({2, 1, 1, {1, 0}}) == Mask(2, 1, std::vector<std::uint8_t>{1, 0}));
    CHECK_THROWS_AS(mask_from_pgm({2, 1, 255, {0, 128}}), IoError);
    CHECK(mask_to_pgm(Mask(2, 1, std::vector<std::uint8_t>{1, 0})) == PgmImage{2, 1, 255, {255, 0}});
}

TEST_CASE("quantize_band inverts normalization on the grid") {
    Rng rng(41);
    for (int depth : {8, 16}) {
        const double maxval = depth == 8 ? 255.0 : 65535.0;
        std::vector<double> values(20);
        for (double& v : values) v = std::round(rng.uniform(0.0, maxval)) / (maxval / 255.0);
        const PgmImage q = quantize_band(5, 4, values, depth);
        CHECK(normalized_samples(q) == values);
    }
    CHECK_THROWS_AS(quantize_band(1, 1, std::vector<double>{1.0}, 12), ConfigError);
}

TEST_CASE("manifest grammar") {
    const std::string text =
        "calseg-manifest 1\n# comment\nsplit test\nbit_depth 16\nbands red nir\n"
        "entry a m.pgm - a_r.pgm a_n.pgm\nentry b - - b_r.pgm b_n.pgm\n";
    const DatasetManifest m = parse_manifest(text);
    CHECK(m.split == Split::Test);
    CHECK(m.bit_depth == 16);
    CHECK(m.bands == std::vector<Band>{Band::Red, Band::Nir});
    REQUIRE(m.entries.size() == 2);
    CHECK(m.entries[0].mask_file == "m.pgm");
    CHECK(!m.entries[1].mask_file);
    CHECK(parse_manifest(format_manifest(m)) == m);

    CHECK_THROWS_AS(parse_manifest(""), IoError);
    CHECK_THROWS_AS(parse_manifest("calseg-manifest 2\n"), IoError);
    CHECK_THROWS_AS(parse_manifest("calseg-manifest 1\ncolour red\n"), IoError);
    CHECK_THROWS_AS(parse_manifest("calseg-manifest 1\nbands red\nentry a - - x\nentry a - - y\n"), IoError);
    CHECK_THROWS_AS(parse_manifest("calseg-manifest 1\nbands red\nentry a - - x y\n"), IoError);
    CHECK_THROWS_AS(parse_manifest("calseg-manifest 1\nbands red\nentry a - - x\nsplit test\n"), IoError);
    CHECK_THROWS_AS(parse_manifest("calseg-manifest 1\nbit_depth 12\n"), IoError);
}

TEST_CASE("loading a 384x384 four-band entry") {
    TempDir dir("load384");
    const std::size_t n = 384 * 384;
    std::string line = "entry p0 mask.pgm -";
    for (Band b : default_bands()) {
        PgmImage img{384, 384, 255, std::vector<std::uint16_t>(n)};
        for (std::size_t i = 0; i < n; ++i) img.samples[i] = static_cast<std::uint16_t>((i + static_cast<int>(b)) % 256);
        const std::string name = std::string(band_name(b)) + ".pgm";
        write_pgm(dir / name, img);
        line += " " + name;
    }
    write_pgm(dir / "mask.pgm", PgmImage{384, 384, 255, std::vector<std::uint16_t>(n, 255)});
    fixtures::write_text(dir / "manifest.txt", "calseg-manifest 1\nbands red green blue nir\n" + line + "\n");

    const Dataset ds = load_dataset(dir / "manifest.txt");
    REQUIRE(ds.size() == 1);
    CHECK(ds.samples[0].patch.width() == 384);
    CHECK(ds.samples[0].patch.height() == 384);
    CHECK(ds.samples[0].patch.band_count() == 4);
    CHECK(ds.samples[0].patch(3, 1, 0) == 4.0);
    CHECK(ds.samples[0].mask->count_positive() == n);
}

TEST_CASE("load errors name the entry") {
    TempDir dir("loaderr");
    write_pgm(dir / "r.pgm", PgmImage{2, 2, 255, {1, 2, 3, 4}});
    write_pgm(dir / "bad_mask.pgm", PgmImage{2, 2, 255, {0, 128, 255, 0}});
    write_pgm(dir / "small.pgm", PgmImage{1, 2, 255, {1, 2}});

    const auto expect_error = [&](const std::string& entry, const std::string& fragment) {
        fixtures::write_text(dir / "manifest.txt", "calseg-manifest 1\nbands red\n" + entry + "\n");
        try {
            load_dataset(dir / "manifest.txt");
            FAIL("expected an IoError");
        } catch (const IoError& e) {
            const std::string what = e.what();
            CHECK(what.find(fragment) != std::string::npos);
        }
    };
    expect_error("entry e1 bad_mask.pgm - r.pgm", "entry 'e1'");
    expect_error("entry e2 - - missing.pgm", "entry 'e2'");
    expect_error("entry e3 small.pgm - r.pgm", "entry 'e3'");
    CHECK_THROWS_AS(load_dataset(dir / "nope.txt"), IoError);
}

TEST_CASE("empty dataset round-trips") {
    TempDir dir("empty");
    Dataset empty;
    empty.split = Split::Test;
    const auto manifest = write_dataset(empty, dir.path());
    CHECK(parse_manifest(fixtures::read_text(manifest)).entries.empty());
    CHECK(load_dataset(manifest) == empty);
}

TEST_CASE("dataset write/load is the identity at 8 and 16 bits") {
    for (int depth : {8, 16}) {
        SynthConfig cfg = small_synth();
        cfg.bit_depth = depth;
        const Dataset ds = make_benchmark(cfg).train;
        TempDir dir("roundtrip");
        const Dataset back = load_dataset(write_dataset(ds, dir.path()));
        CHECK(back == ds);
    }
}

TEST_CASE("synthetic generator noise model") {
    SynthConfig cfg = small_synth();
    cfg.flip_fraction = 0.0;
    cfg.dilation_radius = 0;
    for (const auto& s : generate_synthetic(cfg)) CHECK(s.noisy == s.clean);

    cfg.flip_fraction = 1.0;
    for (const auto& s : generate_synthetic(cfg)) CHECK(s.noisy == s.clean.complement());

    cfg.flip_fraction = 0.15;
    for (const auto& s : generate_synthetic(cfg)) {
        std::size_t hamming = 0;
        for (std::size_t i = 0; i < s.clean.size(); ++i) hamming += s.noisy[i] != s.clean[i];
        CHECK(s.flipped == static_cast<std::size_t>(std::llround(0.15 * 256)));
        CHECK(hamming == s.flipped);
        CHECK(s.clean == binarize(s.field, cfg.true_threshold));
    }
}

TEST_CASE("synthetic generator is a pure function of its config") {
    const SynthConfig cfg = small_synth();
    const auto a = make_benchmark(cfg);
    const auto b = make_benchmark(cfg);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    SynthConfig other = cfg;
    other.seed = 2;
    CHECK(!(make_benchmark(other).train == a.train));
    CHECK(a.test.size() == 2);
    CHECK(a.train.samples[0].id == "train_0000");
    CHECK(a.test.samples[1].id == "test_0001");
}

TEST_CASE("synthetic config validation") {
    SynthConfig cfg;
    cfg.true_threshold = 45.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.true_threshold = 255.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.count = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.flip_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.smoothness = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("38-Cloud directory scan") {
    TempDir dir("scan");
    const PgmImage band{2, 2, 255, {10, 20, 30, 40}};
    for (const char* sub : {"src/red", "src/green", "src/blue", "src/nir", "src/gt"}) {
        std::filesystem::create_directories(dir / sub);
    }
    for (const std::string id : {"patch_2_1_by_1_LC08_X", "patch_1_1_by_2_LC08_X"}) {
        for (const std::string b : {"red", "green", "blue", "nir"}) write_pgm(dir / ("src/" + b + "/" + b + "_" + id + ".pgm"), band);
    }
    write_pgm(dir / "src/gt/gt_patch_1_1_by_2_LC08_X.pgm", PgmImage{2, 2, 255, {0, 255, 0, 0}});
    fixtures::write_text(dir / "src/readme.txt", "ignored");

    const DatasetManifest m = scan_38cloud(dir / "src", dir.path(), Split::Train);
    REQUIRE(m.entries.size() == 2);
    CHECK(m.entries[0].id == "patch_1_1_by_2_LC08_X");
    CHECK(m.entries[0].mask_file == "src/gt/gt_patch_1_1_by_2_LC08_X.pgm");
    CHECK(m.entries[0].band_files[3] == "src/nir/nir_patch_1_1_by_2_LC08_X.pgm");
    CHECK(!m.entries[1].mask_file);
    CHECK(m.bit_depth == 8);

    fixtures::write_text(dir / "manifest.txt", format_manifest(m));
    const Dataset ds = load_dataset(dir / "manifest.txt");
    CHECK(ds.samples[0].mask->count_positive() == 1);

    std::filesystem::remove(dir / "src/nir/nir_patch_2_1_by_1_LC08_X.pgm");
    CHECK_THROWS_AS(scan_38cloud(dir / "src", dir.path(), Split::Train), IoError);
}
