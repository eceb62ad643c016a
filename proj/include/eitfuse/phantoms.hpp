#pragma once

#include <cstdint>
#include <vector>

#include "eitfuse/forward.hpp"
#include "eitfuse/raster.hpp"

namespace eitfuse {

inline constexpr double kBackgroundConductivity = 0.05;

struct CircleInclusion {
    Point2 center;       // mm
    double radius_mm = 0.0;
    double conductivity = 0.0;

    bool contains(double x, double y) const {
        const double dx = x - center.x;
        const double dy = y - center.y;
        return dx * dx + dy * dy <= radius_mm * radius_mm;
    }
    friend bool operator==(const CircleInclusion&, const CircleInclusion&) = default;
};

struct PhantomScene {
    double background_conductivity = kBackgroundConductivity;
    std::vector<CircleInclusion> inclusions;

    /// Conductivity at a point; first containing inclusion wins.
    double conductivity_at(double x, double y) const;
    friend bool operator==(const PhantomScene&, const PhantomScene&) = default;
};

/// Random inclusion recipe. Diameters and margin are fractions of the sensing diameter.
struct PhantomRecipe {
    double min_diameter_fraction = 0.03;
    double max_diameter_fraction = 0.3;
    double min_conductivity = 1e-4;
    double max_conductivity = 0.05;
    double boundary_margin_fraction = 0.02;
    int max_attempts = 10000;
};

PhantomScene sample_phantom(std::uint64_t seed, int object_count, const SensorGeometry& geometry,
                            const PhantomRecipe& recipe = {});

/// Element conductivity by centroid membership.
ConductivityField rasterize_field(const PhantomScene& scene, const Mesh& mesh);

/// Pixel-center sampling of -(sigma - sigma0)/sigma0; zero outside the circle.
PixelImage truth_image(const PhantomScene& scene, const PixelGrid& grid);
MaskImage mask_image(const PhantomScene& scene, const PixelGrid& grid);

/// Cell-growth-in-scaffold scenes: 3 mm effective-conductivity disks.
/// Variant 1: one cluster at 0.025 S/m. Variant 2: clusters at 0.02 and 0.04 S/m.
struct ScaffoldLayout {
    double disk_diameter_mm = 3.0;
    Point2 first{-2.5, 0.0};
    Point2 second{2.5, 0.0};
};
PhantomScene scaffold_scene(int variant, const ScaffoldLayout& layout = {});

/// Flips object-boundary pixels with probability `strength`, then repairs the
/// flipped neighbourhoods with a 3x3 closing.
MaskImage perturb_mask(const MaskImage& mask, std::uint64_t seed, double strength);

/// |a & b| / |a | b|; 1 when both are empty.
double mask_iou(const MaskImage& a, const MaskImage& b);

}  // namespace eitfuse
