#include "cal/raster.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "cal/error.hpp"

namespace cal {

std::string_view band_name(Band band) {
    switch (band) {
        case Band::Red: return "red";
        case Band::Green: return "green";
        case Band::Blue: return "blue";
        case Band::Nir: return "nir";
    }
    return "unknown";
}

Band parse_band(std::string_view name) {
    for (Band b : default_bands()) {
        if (band_name(b) == name) return b;
    }
    throw ConfigError(fmt::format("unknown band '{}'", name));
}

std::vector<Band> default_bands() { return {Band::Red, Band::Green, Band::Blue, Band::Nir}; }

template <typename T>
Grid<T>::Grid(std::size_t width, std::size_t height, std::vector<T> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width == 0 || height == 0) {
        throw DimensionError(fmt::format("grid must be non-empty, got {}x{}", width, height));
    }
    if (values_.size() != width * height) {
        throw DimensionError(fmt::format("grid {}x{} needs {} values, got {}", width, height,
                                         width * height, values_.size()));
    }
}

template class Grid<double>;
template class Grid<std::uint8_t>;

namespace {

bool in_intensity_range(double v) { return std::isfinite(v) && v >= 0.0 && v <= kIntensityMax; }

}  // namespace

IntensityMap::IntensityMap(std::size_t width, std::size_t height, std::vector<double> values)
    : Grid(width, height, std::move(values)) {
    if (!std::all_of(values_.begin(), values_.end(), in_intensity_range)) {
        throw ConfigError("intensity values must lie in [0, 255]");
    }
}

Mask::Mask(std::size_t width, std::size_t height, std::vector<std::uint8_t> values)
    : Grid(width, height, std::move(values)) {
    if (!std::all_of(values_.begin(), values_.end(), [](std::uint8_t v) { return v <= 1; })) {
        throw ConfigError("mask values must be 0 or 1");
    }
}

std::size_t Mask::count_positive() const {
    return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

Mask Mask::complement() const {
    std::vector<std::uint8_t> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(1 - v); });
    return Mask(width_, height_, std::move(out));
}

ImagePatch::ImagePatch(std::size_t width, std::size_t height, std::vector<Band> bands,
                       std::vector<std::vector<double>> data)
    : width_(width), height_(height), bands_(std::move(bands)), data_(std::move(data)) {
    if (width == 0 || height == 0) {
        throw DimensionError(fmt::format("patch must be non-empty, got {}x{}", width, height));
    }
    if (bands_.empty()) throw DimensionError("patch needs at least one band");
    if (data_.size() != bands_.size()) {
        throw DimensionError(fmt::format("patch declares {} bands but carries {} grids",
                                         bands_.size(), data_.size()));
    }
    for (std::size_t b = 0; b < data_.size(); ++b) {
        if (data_[b].size() != width * height) {
            throw DimensionError(fmt::format("band {} has {} values, expected {}", b,
                                             data_[b].size(), width * height));
        }
        if (!std::all_of(data_[b].begin(), data_[b].end(), in_intensity_range)) {
            throw ConfigError(fmt::format("band {} has intensities outside [0, 255]", b));
        }
    }
}

}  // namespace cal
