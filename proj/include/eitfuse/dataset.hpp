#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eitfuse/frame.hpp"
#include "eitfuse/geometry.hpp"
#include "eitfuse/raster.hpp"

namespace eitfuse {

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr int kImagePixels = kImageSide * kImageSide;

/// One entry of the noise plan; std::nullopt means clean.
using NoiseLevel = std::optional<double>;

enum class NoiseDomain { Normalized, Raw };

struct DatasetConfig {
    std::uint64_t seed = 0;
    std::array<int, 4> counts{0, 0, 0, 0};  // samples with 1, 2, 3, 4 objects
    SensorGeometry geometry;
    double forward_h_mm = 0.1;
    double jacobian_h_mm = 0.2;
    std::vector<NoiseLevel> noise_plan{std::nullopt};
    NoiseDomain noise_domain = NoiseDomain::Normalized;
    int version = kDatasetFormatVersion;

    int total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
    /// Object count of sample i (samples are grouped by type in order 1..4).
    int object_count_of(int index) const;
    /// Noise bucket of sample i: index modulo the plan length.
    NoiseLevel noise_of(int index) const;
    void validate() const;
};

/// Full-scale counts used for the published dataset.
inline constexpr std::array<int, 4> kFullScaleCounts{7035, 7298, 7500, 7500};

/// In-memory dataset; arrays are row-major float32 / uint8.
struct Dataset {
    DatasetConfig config;
    std::vector<float> voltages;      // n x 104
    std::vector<float> truths;        // n x 4096
    std::vector<std::uint8_t> masks;  // n x 4096

    int size() const { return config.total(); }
    MeasurementFrame frame(int i) const;
    PixelImage truth(int i) const;
    MaskImage mask(int i) const;
};

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;
};

/// Per-type sizes (test, val, train) for n samples of one type: test =
/// floor(n/10), val = floor((n - test)/10), each raised to 1 when n allows.
std::array<int, 3> split_sizes(int n);

/// Per object type: shuffle with `seed`, take test, then validation, rest train.
SplitIndices stratified_split(const DatasetConfig& config, std::uint64_t seed);

/// Gaussian noise with sigma = rms(frame) * 10^(-snr/20). Clean level returns the input.
MeasurementFrame add_noise(const MeasurementFrame& frame, NoiseLevel snr_db, std::uint64_t seed);

/// Seed of the noise stream for sample i.
std::uint64_t noise_seed(std::uint64_t dataset_seed, int index);

/// Simulates every sample. Sample i uses phantom seed config.seed + i.
Dataset generate_dataset(const DatasetConfig& config, int jobs = 1);

/// Writes manifest.json and the array files; does not write splits.
void write_dataset(const Dataset& ds, const std::filesystem::path& dir);
void write_splits(const SplitIndices& splits, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);
SplitIndices load_splits(const std::filesystem::path& dir);
DatasetConfig read_manifest(const std::filesystem::path& dir);

std::string noise_level_name(NoiseLevel level);
NoiseLevel parse_noise_level(const std::string& text);

/// Raw little-endian array helpers.
void write_f32le(const std::filesystem::path& path, const std::vector<float>& values);
std::vector<float> read_f32le(const std::filesystem::path& path);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace eitfuse
