#pragma once

#include <vector>

#include "eitfuse/raster.hpp"

namespace eitfuse {

/// Binary pattern with an origin. Offsets of set cells are (row - origin_row,
/// col - origin_col).
struct StructuringElement {
    BinaryImage pattern;
    int origin_row = 0;
    int origin_col = 0;

    static StructuringElement box(int size = 3);
    StructuringElement reflected() const;

    struct Offset {
        int dr;
        int dc;
    };
    std::vector<Offset> offsets() const;
    void validate() const;
};

/// Pixels outside the image are background.
BinaryImage erode(const BinaryImage& img, const StructuringElement& se);
/// {z | reflect(S)_z intersects img}.
BinaryImage dilate(const BinaryImage& img, const StructuringElement& se);
/// Union of translates of S contained in img.
BinaryImage open(const BinaryImage& img, const StructuringElement& se);
BinaryImage close(const BinaryImage& img, const StructuringElement& se);

}  // namespace eitfuse
