#pragma once

#include <array>
#include <span>
#include <vector>

#include "eitfuse/forward.hpp"

namespace eitfuse {

inline constexpr int kFrameSize = 104;

enum class FrameKind { RawVoltage, NormalizedDifference };

/// Reciprocity-reduced adjacent-protocol frame: 104 values in the order
/// V^{1,3}..V^{1,15}, V^{2,4}..V^{2,16}, V^{3,5}..V^{3,16}, ..., V^{14,16}.
struct MeasurementFrame {
    std::array<double, kFrameSize> values{};
    FrameKind kind = FrameKind::RawVoltage;

    friend bool operator==(const MeasurementFrame&, const MeasurementFrame&) = default;
};

/// (injection l, measurement pair g), both 1-based.
struct MeasurementIndex {
    int injection;
    int pair;
};

/// The canonical ordering; entry k describes frame value k.
const std::array<MeasurementIndex, kFrameSize>& canonical_order();

/// Position of (l, g) or of its reciprocal (g, l) in the frame; -1 when the
/// pairs share an electrode.
int frame_position(int injection, int pair);

MeasurementFrame extract_frame(const FullVoltageSet& full);

/// Element-wise (v1 - v0) / v0. Throws InputError naming the first zero entry of v0.
MeasurementFrame normalized_difference(const MeasurementFrame& v1, const MeasurementFrame& v0);

}  // namespace eitfuse
