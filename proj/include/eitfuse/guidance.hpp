#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "eitfuse/morphology.hpp"
#include "eitfuse/phantoms.hpp"
#include "eitfuse/raster.hpp"

namespace eitfuse {

inline constexpr int kGuidanceSide = 406;

/// 8-bit RGB image, interleaved row-major.
struct RgbImage {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> rgb;

    RgbImage() = default;
    RgbImage(int r, int c) : rows(r), cols(c), rgb(static_cast<std::size_t>(r) * c * 3, 0) {}

    std::uint8_t* pixel(int r, int c) { return &rgb[(static_cast<std::size_t>(r) * cols + c) * 3]; }
    const std::uint8_t* pixel(int r, int c) const {
        return &rgb[(static_cast<std::size_t>(r) * cols + c) * 3];
    }
    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Pixels of a rows x cols raster whose centers lie in the inscribed circle.
BinaryImage inscribed_circle(int rows, int cols);

/// Log-chromaticity coordinates (chi1, chi2) of one pixel; channels clamped to >= 1.
std::array<double, 2> log_chromaticity(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// exp(chi1 cos(theta) + chi2 sin(theta)) per pixel; theta in degrees.
GrayImage invariant_image(const RgbImage& img, double theta_deg);

/// Shannon entropy (bits) of the histogram of the values selected by `support`
/// (all pixels when empty). Bin width follows Scott's rule on the middle 90%
/// of the values, and the bins span exactly that range.
double projection_entropy(const GrayImage& gray, const BinaryImage& support = {});
double projection_entropy(std::vector<double> values);

/// Integer angle in [1, 180] with the smallest projection entropy (ties -> smallest).
int select_theta(const RgbImage& img);
std::array<double, 180> theta_entropies(const RgbImage& img);

/// 0 where value < beta, 1 otherwise.
BinaryImage threshold_image(const GrayImage& gray, double beta);

/// Area-weighted box average onto a 64x64 grid, binarized at 0.5, circle-cropped.
MaskImage downsample_mask(const BinaryImage& img, int side = kImageSide);

enum class Polarity { Auto, Invert, Keep };

struct GuidanceOptions {
    double beta = 0.5;
    StructuringElement element = StructuringElement::box(3);
    Polarity polarity = Polarity::Auto;
    std::optional<int> theta_deg;  // pinned projection angle; selected per image when empty
};

struct GuidanceResult {
    int theta_deg = 0;
    GrayImage invariant;     // raw I^inv
    GrayImage normalized;    // min-max over the circle, in [0, 1]
    BinaryImage thresholded;
    bool inverted = false;
    BinaryImage cleaned;     // after open + dilate
    MaskImage mask;
};

GuidanceResult run_guidance(const RgbImage& img, const GuidanceOptions& options = {});
MaskImage process_guidance(const RgbImage& img, const GuidanceOptions& options = {});

/// Microscope stand-in: bright background, stained cell disks, linear shading of
/// relative depth `shade_strength`, Gaussian channel noise. Channel k is scaled
/// by light^shade_exponent[k], so shading moves log-chromaticity along one
/// fixed direction, as an illuminant change does.
struct GuidanceStyle {
    std::array<double, 3> background{230.0, 225.0, 220.0};
    std::array<double, 3> object{90.0, 60.0, 150.0};
    std::array<double, 3> shade_exponent{0.8, 1.0, 1.3};
    double noise_sigma = 1.5;
};
RgbImage synth_guidance(const PhantomScene& scene, double radius_mm, std::uint64_t seed,
                        double shade_strength, const GuidanceStyle& style = {});

}  // namespace eitfuse
