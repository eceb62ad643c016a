#include "eitfuse/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eitfuse/error.hpp"
#include "eitfuse/forward.hpp"
#include "eitfuse/parallel.hpp"
#include "eitfuse/phantoms.hpp"

namespace eitfuse {

namespace fs = std::filesystem;
using nlohmann::json;

int DatasetConfig::object_count_of(int index) const {
    int start = 0;
    for (int t = 0; t < 4; ++t) {
        if (index < start + counts[t]) return t + 1;
        start += counts[t];
    }
    throw InputError("sample index " + std::to_string(index) + " out of range");
}

NoiseLevel DatasetConfig::noise_of(int index) const {
    if (noise_plan.empty()) return std::nullopt;
    return noise_plan[static_cast<std::size_t>(index) % noise_plan.size()];
}

void DatasetConfig::validate() const {
    geometry.validate();
    for (int c : counts)
        if (c < 0) throw InputError("sample counts must be non-negative");
    if (!(forward_h_mm > 0.0 && jacobian_h_mm > 0.0)) throw InputError("mesh densities must be positive");
    if (!(forward_h_mm < jacobian_h_mm)) {
        throw InputError("forward mesh must be strictly finer than the jacobian mesh");
    }
    for (const auto& level : noise_plan)
        if (level && !std::isfinite(*level)) throw InputError("noise levels must be finite");
    if (version != kDatasetFormatVersion) throw InputError("unsupported dataset version");
}

MeasurementFrame Dataset::frame(int i) const {
    MeasurementFrame f;
    f.kind = FrameKind::NormalizedDifference;
    for (int k = 0; k < kFrameSize; ++k) f.values[k] = voltages[static_cast<std::size_t>(i) * kFrameSize + k];
    return f;
}

PixelImage Dataset::truth(int i) const {
    PixelImage img(kImageSide, kImageSide);
    std::copy_n(truths.begin() + static_cast<std::ptrdiff_t>(i) * kImagePixels, kImagePixels, img.data.begin());
    return img;
}

MaskImage Dataset::mask(int i) const {
    MaskImage img(kImageSide, kImageSide);
    std::copy_n(masks.begin() + static_cast<std::ptrdiff_t>(i) * kImagePixels, kImagePixels, img.data.begin());
    return img;
}

std::array<int, 3> split_sizes(int n) {
    int test = n / 10;
    int val = (n - test) / 10;
    if (n >= 3) {
        test = std::max(test, 1);
        val = std::max(val, 1);
    }
    return {test, val, n - test - val};
}

SplitIndices stratified_split(const DatasetConfig& config, std::uint64_t seed) {
    SplitIndices out;
    std::mt19937_64 rng(seed);
    int start = 0;
    for (int t = 0; t < 4; ++t) {
        const int n = config.counts[t];
        if (n > 0 && n < 10) {
            std::clog << "warning: only " << n << " samples with " << t + 1
                      << " objects; split proportions are approximate\n";
        }
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), start);
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto [test, val, train] = split_sizes(n);
        out.test.insert(out.test.end(), idx.begin(), idx.begin() + test);
        out.val.insert(out.val.end(), idx.begin() + test, idx.begin() + test + val);
        out.train.insert(out.train.end(), idx.begin() + test + val, idx.end());
        start += n;
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::uint64_t noise_seed(std::uint64_t dataset_seed, int index) {
    // splitmix64 finalizer keeps noise streams decorrelated from phantom seeds.
    std::uint64_t z = dataset_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

MeasurementFrame add_noise(const MeasurementFrame& frame, NoiseLevel snr_db, std::uint64_t seed) {
    if (!snr_db) return frame;
    if (!std::isfinite(*snr_db)) throw InputError("SNR must be finite");
    double ss = 0.0;
    for (double v : frame.values) ss += v * v;
    const double rms = std::sqrt(ss / kFrameSize);
    const double sigma = rms * std::pow(10.0, -*snr_db / 20.0);
    MeasurementFrame out = frame;
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : out.values) v += noise(rng);
    return out;
}

Dataset generate_dataset(const DatasetConfig& config, int jobs) {
    config.validate();
    const int n = config.total();
    Dataset ds;
    ds.config = config;
    ds.voltages.assign(static_cast<std::size_t>(n) * kFrameSize, 0.0f);
    ds.truths.assign(static_cast<std::size_t>(n) * kImagePixels, 0.0f);
    ds.masks.assign(static_cast<std::size_t>(n) * kImagePixels, 0);

    const Mesh mesh = build_mesh(config.geometry, config.forward_h_mm);
    const PixelGrid grid{kImageSide, config.geometry.radius_mm};
    const auto reference = extract_frame(full_forward(
        mesh, ConductivityField::uniform(mesh.element_count(), kBackgroundConductivity),
        config.geometry, config.geometry.current));

    parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t s) {
        const int i = static_cast<int>(s);
        try {
            const PhantomScene scene =
                sample_phantom(config.seed + static_cast<std::uint64_t>(i), config.object_count_of(i), config.geometry);
            const auto raw = extract_frame(
                full_forward(mesh, rasterize_field(scene, mesh), config.geometry, config.geometry.current));
            const NoiseLevel level = config.noise_of(i);
            const std::uint64_t nseed = noise_seed(config.seed, i);
            const MeasurementFrame dv =
                config.noise_domain == NoiseDomain::Normalized
                    ? add_noise(normalized_difference(raw, reference), level, nseed)
                    : normalized_difference(add_noise(raw, level, nseed), reference);
            for (int k = 0; k < kFrameSize; ++k) ds.voltages[s * kFrameSize + k] = static_cast<float>(dv.values[k]);
            const PixelImage truth = truth_image(scene, grid);
            const MaskImage mask = mask_image(scene, grid);
            for (int p = 0; p < kImagePixels; ++p) {
                ds.truths[s * kImagePixels + p] = static_cast<float>(truth.data[p]);
                ds.masks[s * kImagePixels + p] = mask.data[p];
            }
        } catch (const Error& e) {
            throw SolverError("sample " + std::to_string(i) + ": " + e.what());
        }
    });
    return ds;
}

std::string noise_level_name(NoiseLevel level) {
    if (!level) return "clean";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << *level;
    return os.str();
}

NoiseLevel parse_noise_level(const std::string& text) {
    if (text == "clean") return std::nullopt;
    std::istringstream is(text);
    is.imbue(std::locale::classic());
    double v = 0.0;
    if (!(is >> v) || !is.eof() || !std::isfinite(v)) throw InputError("invalid noise level '" + text + "'");
    return v;
}

namespace {

json manifest_json(const DatasetConfig& c) {
    json plan = json::array();
    for (const auto& level : c.noise_plan) {
        if (level) plan.push_back(*level);
        else plan.push_back("clean");
    }
    return json{
        {"version", c.version},
        {"seed", c.seed},
        {"counts", c.counts},
        {"n", c.total()},
        {"geometry",
         {{"radius_mm", c.geometry.radius_mm},
          {"electrode_count", c.geometry.electrode_count},
          {"electrode_coverage", c.geometry.electrode_coverage},
          {"contact_impedance", c.geometry.contact_impedance},
          {"current", c.geometry.current},
          {"forward_h_mm", c.forward_h_mm},
          {"jacobian_h_mm", c.jacobian_h_mm}}},
        {"noise_plan", plan},
        {"noise_domain", c.noise_domain == NoiseDomain::Normalized ? "normalized" : "raw"},
        {"order", "row-major"},
        {"endianness", "little"},
    };
}

void check_size(const fs::path& path, std::uintmax_t expected) {
    std::error_code ec;
    const auto actual = fs::file_size(path, ec);
    if (ec) throw FormatError("missing array file " + path.string());
    if (actual != expected) {
        throw FormatError("size mismatch in " + path.string() + ": expected " + std::to_string(expected) +
                          " bytes, found " + std::to_string(actual));
    }
}

void write_index_file(const fs::path& path, const std::vector<int>& idx) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    for (int i : idx) out << i << '\n';
    if (!out) throw Error("failed writing " + path.string());
}

std::vector<int> read_index_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("missing split file " + path.string());
    std::vector<int> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            out.push_back(std::stoi(line));
        } catch (const std::exception&) {
            throw FormatError("malformed index '" + line + "' in " + path.string());
        }
    }
    return out;
}

}  // namespace

void write_f32le(const fs::path& path, const std::vector<float>& values) {
    static_assert(sizeof(float) == 4);
    std::vector<std::uint8_t> bytes(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint32_t bits;
        std::memcpy(&bits, &values[i], 4);
        for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<std::uint8_t>(bits >> (8 * b));
    }
    write_bytes(path, bytes);
}

std::vector<float> read_f32le(const fs::path& path) {
    const auto bytes = read_bytes(path);
    if (bytes.size() % 4 != 0) throw FormatError("size of " + path.string() + " is not a multiple of 4");
    std::vector<float> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[i * 4 + b]) << (8 * b);
        std::memcpy(&out[i], &bits, 4);
    }
    return out;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing " + path.string());
}

void write_dataset(const Dataset& ds, const fs::path& dir) {
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
        out << manifest_json(ds.config).dump(2) << '\n';
    }
    write_f32le(dir / "voltages.f32le", ds.voltages);
    write_f32le(dir / "truths.f32le", ds.truths);
    write_bytes(dir / "masks.u8", ds.masks);
}

void write_splits(const SplitIndices& splits, const fs::path& dir) {
    write_index_file(dir / "train.idx", splits.train);
    write_index_file(dir / "val.idx", splits.val);
    write_index_file(dir / "test.idx", splits.test);
}

DatasetConfig read_manifest(const fs::path& dir) {
    const fs::path path = dir / "manifest.json";
    std::ifstream in(path);
    if (!in) throw FormatError("missing manifest " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("malformed manifest " + path.string() + ": " + e.what());
    }
    DatasetConfig c;
    try {
        c.version = j.at("version").get<int>();
        if (c.version != kDatasetFormatVersion) {
            throw FormatError("unsupported dataset version " + std::to_string(c.version) + " in " +
                              path.string() + " (expected " + std::to_string(kDatasetFormatVersion) + ")");
        }
        c.seed = j.at("seed").get<std::uint64_t>();
        c.counts = j.at("counts").get<std::array<int, 4>>();
        const auto& g = j.at("geometry");
        c.geometry.radius_mm = g.at("radius_mm").get<double>();
        c.geometry.electrode_count = g.at("electrode_count").get<int>();
        c.geometry.electrode_coverage = g.at("electrode_coverage").get<double>();
        c.geometry.contact_impedance = g.at("contact_impedance").get<double>();
        c.geometry.current = g.at("current").get<double>();
        c.forward_h_mm = g.at("forward_h_mm").get<double>();
        c.jacobian_h_mm = g.at("jacobian_h_mm").get<double>();
        c.noise_plan.clear();
        for (const auto& e : j.at("noise_plan")) {
            if (e.is_string()) c.noise_plan.push_back(parse_noise_level(e.get<std::string>()));
            else c.noise_plan.push_back(e.get<double>());
        }
        const std::string domain = j.value("noise_domain", "normalized");
        if (domain == "normalized") c.noise_domain = NoiseDomain::Normalized;
        else if (domain == "raw") c.noise_domain = NoiseDomain::Raw;
        else throw FormatError("unknown noise_domain '" + domain + "'");
        if (j.at("order") != "row-major" || j.at("endianness") != "little") {
            throw FormatError("unsupported array layout in " + path.string());
        }
        if (j.at("n").get<int>() != c.total()) {
            throw FormatError("manifest n does not equal the sum of counts in " + path.string());
        }
    } catch (const json::exception& e) {
        throw FormatError("malformed manifest " + path.string() + ": " + e.what());
    } catch (const InputError& e) {
        throw FormatError("malformed manifest " + path.string() + ": " + e.what());
    }
    return c;
}

Dataset load_dataset(const fs::path& dir) {
    Dataset ds;
    ds.config = read_manifest(dir);
    const auto n = static_cast<std::uintmax_t>(ds.config.total());
    check_size(dir / "voltages.f32le", n * kFrameSize * 4);
    check_size(dir / "truths.f32le", n * kImagePixels * 4);
    check_size(dir / "masks.u8", n * kImagePixels);
    ds.voltages = read_f32le(dir / "voltages.f32le");
    ds.truths = read_f32le(dir / "truths.f32le");
    ds.masks = read_bytes(dir / "masks.u8");
    for (std::size_t i = 0; i < ds.masks.size(); ++i) {
        if (ds.masks[i] > 1) throw FormatError("masks.u8 holds a non-binary byte at offset " + std::to_string(i));
    }
    return ds;
}

SplitIndices load_splits(const fs::path& dir) {
    return {read_index_file(dir / "train.idx"), read_index_file(dir / "val.idx"),
            read_index_file(dir / "test.idx")};
}

}  // namespace eitfuse
