#include "eitfuse/geometry.hpp"

#include "eitfuse/error.hpp"
#include "eitfuse/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace eitfuse {

void SensorGeometry::validate() const {
    if (!(radius_mm > 0.0)) throw InputError("sensor radius must be positive");
    if (electrode_count != kElectrodeCount)
        throw InputError("electrode count must be 16, got " + std::to_string(electrode_count));
    if (!(electrode_coverage > 0.0 && electrode_coverage < 1.0))
        throw InputError("electrode coverage must lie in (0, 1)");
    if (!(contact_impedance > 0.0)) throw InputError("contact impedance must be positive");
    if (current == 0.0 || !std::isfinite(current)) throw InputError("injected current must be non-zero");
}

std::vector<int> PixelGrid::in_circle_indices() const {
    std::vector<int> out;
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c)
            if (in_circle(r, c)) out.push_back(r * side + c);
    return out;
}

void PixelGrid::locate(double x, double y, int& r, int& c) const {
    const double s = pixel_size_mm();
    c = static_cast<int>(std::floor((x + radius_mm) / s));
    r = static_cast<int>(std::floor((radius_mm - y) / s));
    c = std::clamp(c, 0, side - 1);
    r = std::clamp(r, 0, side - 1);
}

}  // namespace eitfuse
