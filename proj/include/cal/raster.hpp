#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cal {

/// Spectral band identifiers, in the default load order.
enum class Band : std::uint8_t { Red, Green, Blue, Nir };

std::string_view band_name(Band band);
Band parse_band(std::string_view name);
std::vector<Band> default_bands();

inline constexpr double kIntensityMax = 255.0;

/// Row-major 2-D grid. Index (x, y) maps to y * width + x.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t width, std::size_t height, std::vector<T> values);
    Grid(std::size_t width, std::size_t height, T fill)
        : Grid(width, height, std::vector<T>(width * height, fill)) {}

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t size() const { return values_.size(); }

    T operator()(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }
    T operator[](std::size_t i) const { return values_[i]; }
    std::span<const T> values() const { return values_; }

    bool same_shape(std::size_t width, std::size_t height) const {
        return width_ == width && height_ == height;
    }
    template <typename U>
    bool same_shape(const Grid<U>& other) const {
        return same_shape(other.width(), other.height());
    }

    bool operator==(const Grid&) const = default;

protected:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<T> values_;
};

/// Single-channel intensity in [0, 255], the input of the binarization operator.
class IntensityMap : public Grid<double> {
public:
    IntensityMap() = default;
    IntensityMap(std::size_t width, std::size_t height, std::vector<double> values);
};

/// Binary cloud labels: 0 = clear, 1 = cloud.
class Mask : public Grid<std::uint8_t> {
public:
    Mask() = default;
    Mask(std::size_t width, std::size_t height, std::vector<std::uint8_t> values);
    Mask(std::size_t width, std::size_t height, std::uint8_t fill)
        : Mask(width, height, std::vector<std::uint8_t>(width * height, fill)) {}

    std::size_t count_positive() const;
    Mask complement() const;
};

/// Multi-band raster with every intensity normalized into [0, 255].
class ImagePatch {
public:
    ImagePatch() = default;
    ImagePatch(std::size_t width, std::size_t height, std::vector<Band> bands,
               std::vector<std::vector<double>> data);

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t pixel_count() const { return width_ * height_; }
    std::size_t band_count() const { return bands_.size(); }
    const std::vector<Band>& bands() const { return bands_; }

    std::span<const double> band(std::size_t b) const { return data_[b]; }
    double operator()(std::size_t b, std::size_t x, std::size_t y) const {
        return data_[b][y * width_ + x];
    }

    bool operator==(const ImagePatch&) const = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<Band> bands_;
    std::vector<std::vector<double>> data_;
};

}  // namespace cal
