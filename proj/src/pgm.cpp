#include "cal/pgm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

#include <fmt/core.h>

#include "cal/error.hpp"

namespace cal {
namespace {

class HeaderParser {
public:
    explicit HeaderParser(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                return;
            }
        }
    }

    std::uint64_t number(const char* what) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw IoError(fmt::format("PGM header: expected {}", what));
        }
        std::uint64_t v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + static_cast<std::uint64_t>(bytes_[pos_] - '0');
            if (v > (1ULL << 32)) throw IoError(fmt::format("PGM header: {} too large", what));
            ++pos_;
        }
        return v;
    }

    std::size_t& pos() { return pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

PgmImage decode_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
        throw IoError("not a PGM file (expected P5 or P2 magic)");
    }
    const bool binary = bytes[1] == '5';
    HeaderParser header(bytes);
    header.pos() = 2;
    PgmImage img;
    img.width = header.number("width");
    img.height = header.number("height");
    const auto maxval = header.number("maxval");
    if (img.width == 0 || img.height == 0) throw IoError("PGM has zero width or height");
    if (maxval == 0 || maxval > 65535) throw IoError(fmt::format("PGM maxval {} out of range", maxval));
    img.maxval = static_cast<std::uint16_t>(maxval);

    const std::size_t n = img.width * img.height;
    img.samples.resize(n);
    if (binary) {
        // Exactly one whitespace byte separates maxval from the raster.
        std::size_t& pos = header.pos();
        if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
            throw IoError("PGM header: missing separator before raster");
        }
        ++pos;
        const std::size_t bps = img.maxval < 256 ? 1 : 2;
        if (bytes.size() - pos < n * bps) {
            throw IoError(fmt::format("PGM raster truncated: need {} bytes, have {}", n * bps,
                                      bytes.size() - pos));
        }
        for (std::size_t i = 0; i < n; ++i) {
            img.samples[i] = bps == 1 ? bytes[pos + i]
                                      : static_cast<std::uint16_t>((bytes[pos + 2 * i] << 8) |
                                                                   bytes[pos + 2 * i + 1]);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto v = header.number("sample");
            if (v > 65535) throw IoError("PGM sample out of range");
            img.samples[i] = static_cast<std::uint16_t>(v);
        }
    }
    for (std::uint16_t s : img.samples) {
        if (s > img.maxval) throw IoError(fmt::format("PGM sample {} exceeds maxval {}", s, img.maxval));
    }
    return img;
}

std::vector<std::uint8_t> encode_pgm(const PgmImage& image) {
    if (image.samples.size() != image.width * image.height || image.width == 0 ||
        image.height == 0 || image.maxval == 0) {
        throw DimensionError("PGM image has inconsistent dimensions");
    }
    const std::string header = fmt::format("P5\n{} {}\n{}\n", image.width, image.height, image.maxval);
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const bool wide = image.maxval >= 256;
    out.reserve(out.size() + image.samples.size() * (wide ? 2 : 1));
    for (std::uint16_t s : image.samples) {
        if (s > image.maxval) throw DimensionError("PGM sample exceeds maxval");
        if (wide) out.push_back(static_cast<std::uint8_t>(s >> 8));
        out.push_back(static_cast<std::uint8_t>(s & 0xff));
    }
    return out;
}

PgmImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                          std::istreambuf_iterator<char>());
    try {
        return decode_pgm(bytes);
    } catch (const IoError& e) {
        throw IoError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void write_pgm(const std::filesystem::path& path, const PgmImage& image) {
    const auto bytes = encode_pgm(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

std::vector<double> normalized_samples(const PgmImage& image) {
    const double divisor = static_cast<double>(image.maxval) / 255.0;
    std::vector<double> out(image.samples.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = image.samples[i] / divisor;
    return out;
}

PgmImage quantize_band(std::size_t width, std::size_t height, std::span<const double> values,
                       int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw ConfigError(fmt::format("bit depth must be 8 or 16, got {}", bit_depth));
    }
    PgmImage img;
    img.width = width;
    img.height = height;
    img.maxval = bit_depth == 8 ? 255 : 65535;
    const double divisor = static_cast<double>(img.maxval) / 255.0;
    img.samples.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        img.samples[i] = static_cast<std::uint16_t>(std::lround(values[i] * divisor));
    }
    return img;
}

Mask mask_from_pgm(const PgmImage& image) {
    std::vector<std::uint8_t> labels(image.samples.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto s = image.samples[i];
        if (s != 0 && s != image.maxval) {
            throw IoError(fmt::format("mask sample {} at pixel {} is neither 0 nor {}", s, i,
                                      image.maxval));
        }
        labels[i] = s == 0 ? 0 : 1;
    }
    return Mask(image.width, image.height, std::move(labels));
}

PgmImage mask_to_pgm(const Mask& mask) {
    PgmImage img{mask.width(), mask.height(), 255, {}};
    img.samples.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) img.samples[i] = mask[i] ? 255 : 0;
    return img;
}

}  // namespace cal
