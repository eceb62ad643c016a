#include "eitfuse/frame.hpp"

#include <string>

#include "eitfuse/error.hpp"

namespace eitfuse {

namespace {

std::array<MeasurementIndex, kFrameSize> build_order() {
    std::array<MeasurementIndex, kFrameSize> order{};
    int k = 0;
    for (int l = 1; l <= kElectrodeCount; ++l) {
        for (int g = l + 2; g <= kElectrodeCount; ++g) {
            if (l == 1 && g == kElectrodeCount) continue;  // pair (16, 1) touches electrode 1
            order[k++] = {l, g};
        }
    }
    return order;
}

}  // namespace

const std::array<MeasurementIndex, kFrameSize>& canonical_order() {
    static const auto order = build_order();
    return order;
}

int frame_position(int injection, int pair) {
    int l = std::min(injection, pair);
    int g = std::max(injection, pair);
    static const auto table = [] {
        std::array<std::array<int, kElectrodeCount + 1>, kElectrodeCount + 1> t{};
        for (auto& row : t) row.fill(-1);
        const auto& order = canonical_order();
        for (int k = 0; k < kFrameSize; ++k) t[order[k].injection][order[k].pair] = k;
        return t;
    }();
    if (l < 1 || g > kElectrodeCount) return -1;
    return table[l][g];
}

MeasurementFrame extract_frame(const FullVoltageSet& full) {
    if (full.injections.size() != static_cast<std::size_t>(kElectrodeCount)) {
        throw InputError("extract_frame needs all 16 injections");
    }
    MeasurementFrame frame;
    frame.kind = FrameKind::RawVoltage;
    const auto& order = canonical_order();
    for (int k = 0; k < kFrameSize; ++k) {
        frame.values[k] = full.voltage(order[k].injection, order[k].pair);
    }
    return frame;
}

MeasurementFrame normalized_difference(const MeasurementFrame& v1, const MeasurementFrame& v0) {
    MeasurementFrame out;
    out.kind = FrameKind::NormalizedDifference;
    for (int k = 0; k < kFrameSize; ++k) {
        if (v0.values[k] == 0.0) {
            throw InputError("reference measurement " + std::to_string(k) + " is zero");
        }
        out.values[k] = (v1.values[k] - v0.values[k]) / v0.values[k];
    }
    return out;
}

}  // namespace eitfuse
