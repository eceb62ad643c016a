#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace eitfuse {

/// Dense row-major 2D array. Row 0 is the top of the image.
template <class T>
struct Raster {
    int rows = 0;
    int cols = 0;
    std::vector<T> data;

    Raster() = default;
    Raster(int r, int c, T fill = T{})
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    T& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    const T& at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    bool contains(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }
    std::size_t size() const { return data.size(); }

    friend bool operator==(const Raster&, const Raster&) = default;
};

using BinaryImage = Raster<std::uint8_t>;
using GrayImage = Raster<double>;

/// 64x64 image of the relative conductivity decrease -(s1 - s0)/s0.
using PixelImage = Raster<double>;
/// 64x64 binary object mask (1 = object).
using MaskImage = Raster<std::uint8_t>;

inline constexpr int kImageSide = 64;

/// Square pixel grid circumscribing the sensing disk.
struct PixelGrid {
    int side = kImageSide;
    double radius_mm = 7.0;

    double pixel_size_mm() const { return 2.0 * radius_mm / side; }
    double center_x(int c) const { return -radius_mm + (c + 0.5) * pixel_size_mm(); }
    double center_y(int r) const { return radius_mm - (r + 0.5) * pixel_size_mm(); }

    /// Pixel whose center lies inside (or on) the inscribed circle.
    bool in_circle(int r, int c) const {
        const double half = side / 2.0;
        const double dx = c + 0.5 - half;
        const double dy = r + 0.5 - half;
        return dx * dx + dy * dy <= half * half;
    }

    /// Row-major linear indices of the in-circle pixels.
    std::vector<int> in_circle_indices() const;

    /// Pixel containing point (x, y) in mm, clamped to the grid.
    void locate(double x, double y, int& r, int& c) const;
};

}  // namespace eitfuse
