#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cal/raster.hpp"

namespace cal {

/// Raw greyscale raster as stored in a PGM file.
struct PgmImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint16_t maxval = 255;
    std::vector<std::uint16_t> samples;  // row-major

    bool operator==(const PgmImage&) const = default;
};

/// Parses P5 (binary; 1 byte per sample when maxval < 256, else 2 bytes big-endian)
/// and P2 (ASCII). Comments are allowed anywhere in the header.
PgmImage decode_pgm(std::span<const std::uint8_t> bytes);
/// Always writes P5: "P5\n<w> <h>\n<maxval>\n" followed by the raster.
std::vector<std::uint8_t> encode_pgm(const PgmImage& image);

PgmImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const PgmImage& image);

/// Samples scaled into [0, 255]: value / (maxval / 255), so 16-bit data is divided by 257.
std::vector<double> normalized_samples(const PgmImage& image);
/// Inverse of normalized_samples for an 8- or 16-bit target.
PgmImage quantize_band(std::size_t width, std::size_t height, std::span<const double> values,
                       int bit_depth);

/// Masks are stored as {0, maxval}; any other sample is an error.
Mask mask_from_pgm(const PgmImage& image);
PgmImage mask_to_pgm(const Mask& mask);

}  // namespace cal
