#include "eitfuse/phantoms.hpp"

#include <cmath>
#include <random>
#include <string>

#include "eitfuse/error.hpp"
#include "eitfuse/morphology.hpp"

namespace eitfuse {

double PhantomScene::conductivity_at(double x, double y) const {
    for (const auto& inc : inclusions) {
        if (inc.contains(x, y)) return inc.conductivity;
    }
    return background_conductivity;
}

PhantomScene sample_phantom(std::uint64_t seed, int object_count, const SensorGeometry& geometry,
                            const PhantomRecipe& recipe) {
    if (object_count < 1 || object_count > 4) {
        throw InputError("object count must be 1..4, got " + std::to_string(object_count));
    }
    const double d = geometry.diameter_mm();
    const double R = geometry.radius_mm;
    const double margin = recipe.boundary_margin_fraction * d;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    PhantomScene scene;
    int attempts = 0;
    while (static_cast<int>(scene.inclusions.size()) < object_count) {
        if (++attempts > recipe.max_attempts) {
            throw SamplingError("phantom sampling exhausted " + std::to_string(recipe.max_attempts) +
                                " attempts (seed " + std::to_string(seed) + ")");
        }
        const double radius =
            0.5 * uniform(recipe.min_diameter_fraction * d, recipe.max_diameter_fraction * d);
        const double x = uniform(-R, R);
        const double y = uniform(-R, R);
        if (std::hypot(x, y) > R) continue;                  // uniform over the disk
        if (std::hypot(x, y) + radius > R - margin) continue;  // containment with margin
        bool overlaps = false;
        for (const auto& other : scene.inclusions) {
            if (std::hypot(x - other.center.x, y - other.center.y) <= radius + other.radius_mm) {
                overlaps = true;
                break;
            }
        }
        if (overlaps) continue;
        const double sigma = uniform(recipe.min_conductivity, recipe.max_conductivity);
        scene.inclusions.push_back({{x, y}, radius, sigma});
    }
    return scene;
}

ConductivityField rasterize_field(const PhantomScene& scene, const Mesh& mesh) {
    ConductivityField field;
    field.values.resize(mesh.element_count());
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const Point2 c = mesh.centroid(e);
        field.values[e] = scene.conductivity_at(c.x, c.y);
    }
    return field;
}

PixelImage truth_image(const PhantomScene& scene, const PixelGrid& grid) {
    if (!(scene.background_conductivity > 0.0)) throw InputError("background conductivity must be positive");
    PixelImage img(grid.side, grid.side, 0.0);
    const double s0 = scene.background_conductivity;
    for (int r = 0; r < grid.side; ++r) {
        for (int c = 0; c < grid.side; ++c) {
            if (!grid.in_circle(r, c)) continue;
            for (const auto& inc : scene.inclusions) {
                if (inc.contains(grid.center_x(c), grid.center_y(r))) {
                    img.at(r, c) = (s0 - inc.conductivity) / s0;
                    break;
                }
            }
        }
    }
    return img;
}

MaskImage mask_image(const PhantomScene& scene, const PixelGrid& grid) {
    MaskImage img(grid.side, grid.side, 0);
    for (int r = 0; r < grid.side; ++r) {
        for (int c = 0; c < grid.side; ++c) {
            if (!grid.in_circle(r, c)) continue;
            for (const auto& inc : scene.inclusions) {
                if (inc.contains(grid.center_x(c), grid.center_y(r))) {
                    img.at(r, c) = 1;
                    break;
                }
            }
        }
    }
    return img;
}

PhantomScene scaffold_scene(int variant, const ScaffoldLayout& layout) {
    const double radius = 0.5 * layout.disk_diameter_mm;
    PhantomScene scene;
    if (variant == 1) {
        scene.inclusions.push_back({layout.first, radius, 0.025});
    } else if (variant == 2) {
        scene.inclusions.push_back({layout.first, radius, 0.02});
        scene.inclusions.push_back({layout.second, radius, 0.04});
    } else {
        throw InputError("scaffold variant must be 1 or 2");
    }
    return scene;
}

MaskImage perturb_mask(const MaskImage& mask, std::uint64_t seed, double strength) {
    if (!(strength >= 0.0 && strength <= 1.0)) throw InputError("perturbation strength must lie in [0, 1]");
    PixelGrid grid{mask.rows, 1.0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    MaskImage flipped = mask;
    BinaryImage touched(mask.rows, mask.cols, 0);
    bool any = false;
    constexpr int dr[4] = {-1, 1, 0, 0};
    constexpr int dc[4] = {0, 0, -1, 1};
    for (int r = 0; r < mask.rows; ++r) {
        for (int c = 0; c < mask.cols; ++c) {
            if (!grid.in_circle(r, c)) continue;
            bool boundary = false;
            for (int k = 0; k < 4 && !boundary; ++k) {
                const int rr = r + dr[k], cc = c + dc[k];
                if (mask.contains(rr, cc) && mask.at(rr, cc) != mask.at(r, c)) boundary = true;
            }
            // Draw for every in-circle pixel so the stream does not depend on the mask.
            const double u = unit(rng);
            if (boundary && u < strength) {
                flipped.at(r, c) = mask.at(r, c) ? 0 : 1;
                any = true;
                for (int a = -1; a <= 1; ++a)
                    for (int b = -1; b <= 1; ++b)
                        if (touched.contains(r + a, c + b)) touched.at(r + a, c + b) = 1;
            }
        }
    }
    if (!any) return mask;

    const BinaryImage closed = close(flipped, StructuringElement::box(3));
    MaskImage out = mask;
    for (int r = 0; r < mask.rows; ++r) {
        for (int c = 0; c < mask.cols; ++c) {
            if (!grid.in_circle(r, c)) {
                out.at(r, c) = 0;
            } else if (touched.at(r, c)) {
                out.at(r, c) = closed.at(r, c);
            }
        }
    }
    return out;
}

double mask_iou(const MaskImage& a, const MaskImage& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw InputError("mask size mismatch");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        inter += (a.data[i] && b.data[i]);
        uni += (a.data[i] || b.data[i]);
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace eitfuse
