#include "eitfuse/morphology.hpp"

#include "eitfuse/error.hpp"

namespace eitfuse {

StructuringElement StructuringElement::box(int size) {
    if (size < 1 || size % 2 == 0) throw InputError("box structuring element needs an odd size");
    return {BinaryImage(size, size, 1), size / 2, size / 2};
}

StructuringElement StructuringElement::reflected() const {
    StructuringElement out{BinaryImage(pattern.rows, pattern.cols, 0), pattern.rows - 1 - origin_row,
                           pattern.cols - 1 - origin_col};
    for (int r = 0; r < pattern.rows; ++r)
        for (int c = 0; c < pattern.cols; ++c)
            out.pattern.at(pattern.rows - 1 - r, pattern.cols - 1 - c) = pattern.at(r, c);
    return out;
}

std::vector<StructuringElement::Offset> StructuringElement::offsets() const {
    std::vector<Offset> out;
    for (int r = 0; r < pattern.rows; ++r)
        for (int c = 0; c < pattern.cols; ++c)
            if (pattern.at(r, c)) out.push_back({r - origin_row, c - origin_col});
    return out;
}

void StructuringElement::validate() const {
    if (!pattern.contains(origin_row, origin_col)) throw InputError("structuring element origin outside pattern");
    if (offsets().empty()) throw InputError("structuring element is empty");
}

BinaryImage erode(const BinaryImage& img, const StructuringElement& se) {
    se.validate();
    const auto offs = se.offsets();
    BinaryImage out(img.rows, img.cols, 0);
    for (int r = 0; r < img.rows; ++r) {
        for (int c = 0; c < img.cols; ++c) {
            bool fits = true;
            for (const auto& o : offs) {
                const int rr = r + o.dr, cc = c + o.dc;
                if (!img.contains(rr, cc) || !img.at(rr, cc)) {
                    fits = false;
                    break;
                }
            }
            out.at(r, c) = fits ? 1 : 0;
        }
    }
    return out;
}

BinaryImage dilate(const BinaryImage& img, const StructuringElement& se) {
    se.validate();
    const auto offs = se.offsets();
    BinaryImage out(img.rows, img.cols, 0);
    for (int r = 0; r < img.rows; ++r) {
        for (int c = 0; c < img.cols; ++c) {
            for (const auto& o : offs) {
                const int rr = r - o.dr, cc = c - o.dc;
                if (img.contains(rr, cc) && img.at(rr, cc)) {
                    out.at(r, c) = 1;
                    break;
                }
            }
        }
    }
    return out;
}

BinaryImage open(const BinaryImage& img, const StructuringElement& se) {
    return dilate(erode(img, se), se);
}

BinaryImage close(const BinaryImage& img, const StructuringElement& se) {
    return erode(dilate(img, se), se);
}

}  // namespace eitfuse
