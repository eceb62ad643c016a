#pragma once

#include <string>

#include "eitfuse/guidance.hpp"

namespace eitfuse {

void write_ppm(const std::string& path, const RgbImage& img);
RgbImage read_ppm(const std::string& path);

/// 8-bit P5 with values 0/255.
void write_mask_pgm(const std::string& path, const BinaryImage& img);
/// 8-bit P5 read back as binary (nonzero -> 1).
BinaryImage read_mask_pgm(const std::string& path);

/// 16-bit P5 of a min-max scaled gray image.
void write_gray_pgm16(const std::string& path, const GrayImage& img);

/// Raw 8-bit P5 of arbitrary bytes.
void write_pgm8(const std::string& path, int rows, int cols, const std::vector<std::uint8_t>& bytes);

}  // namespace eitfuse
