#pragma once

#include <numbers>

namespace eitfuse {

inline constexpr int kElectrodeCount = 16;

/// Circular 16-electrode sensor. Lengths in mm, contact impedance in Ohm*m^2,
/// current in A.
struct SensorGeometry {
    double radius_mm = 7.0;
    int electrode_count = kElectrodeCount;
    double electrode_coverage = 0.5;
    double contact_impedance = 1e-5;
    double current = 1e-3;

    double diameter_mm() const { return 2.0 * radius_mm; }

    /// Angle (rad, counter-clockwise from +x) of the center of electrode `l` (1-based).
    double electrode_center_angle(int l) const {
        return 2.0 * std::numbers::pi * (l - 1) / electrode_count;
    }

    /// Throws InputError when an invariant does not hold.
    void validate() const;
};

}  // namespace eitfuse
