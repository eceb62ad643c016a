#pragma once

#include <string>
#include <vector>

#include "eitfuse/raster.hpp"

namespace eitfuse::cli {

/// Parses and runs one subcommand. Returns 0 on success, 1 on a domain
/// failure, 2 on a usage error. args[0] is the program name.
int dispatch(const std::vector<std::string>& args);

enum class Palette { Gray, Signed };

struct ClampRange {
    double lo = -0.2;
    double hi = 1.0;
};

/// Gray: byte = round(255 * (clamp(v) - lo) / (hi - lo)).
std::vector<std::uint8_t> gray_bytes(const PixelImage& img, ClampRange range);
/// Signed: white at 0, toward blue for negatives (full at lo), red for positives (full at hi).
std::vector<std::uint8_t> signed_rgb(const PixelImage& img, ClampRange range);

void render_image(const PixelImage& img, Palette palette, ClampRange range, const std::string& path);
void render_mask(const MaskImage& mask, const std::string& path);

}  // namespace eitfuse::cli
