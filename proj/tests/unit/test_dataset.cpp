#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "eitfuse/dataset.hpp"
#include "eitfuse/error.hpp"

using namespace eitfuse;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("eitfuse_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

DatasetConfig small_config(int per_type, std::uint64_t seed) {
    DatasetConfig c;
    c.seed = seed;
    c.counts = {per_type, per_type, per_type, per_type};
    c.forward_h_mm = 0.3;
    c.jacobian_h_mm = 0.5;
    c.noise_plan = {std::nullopt, 50.0, 40.0, 30.0};
    return c;
}

void truncate_file(const fs::path& p, std::uintmax_t size) { fs::resize_file(p, size); }

}  // namespace

TEST_CASE("split arithmetic") {
    CHECK(split_sizes(100) == std::array<int, 3>{10, 9, 81});
    CHECK(split_sizes(3) == std::array<int, 3>{1, 1, 1});
    CHECK(split_sizes(1) == std::array<int, 3>{0, 0, 1});
    DatasetConfig full;
    full.counts = kFullScaleCounts;
    CHECK(full.total() == 29333);
    const SplitIndices s = stratified_split(full, 1);
    CHECK(s.train.size() == 23762);
    CHECK(s.val.size() == 2639);
    CHECK(s.test.size() == 2932);
    std::vector<int> all;
    all.insert(all.end(), s.train.begin(), s.train.end());
    all.insert(all.end(), s.val.begin(), s.val.end());
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    for (int i = 0; i < 29333; ++i) REQUIRE(all[i] == i);
}

TEST_CASE("splits are stratified by object count") {
    DatasetConfig c;
    c.counts = {100, 100, 100, 100};
    const SplitIndices s = stratified_split(c, 4);
    std::array<int, 4> test_per{};
    for (int i : s.test) test_per[c.object_count_of(i) - 1] += 1;
    for (int k : test_per) CHECK(k == 10);
    CHECK(stratified_split(c, 4).test == s.test);
    CHECK_FALSE(stratified_split(c, 5).test == s.test);
}

TEST_CASE("noise model") {
    MeasurementFrame f;
    for (int k = 0; k < kFrameSize; ++k) f.values[k] = std::sin(0.3 * k) + 0.1;
    CHECK(add_noise(f, std::nullopt, 1) == f);
    double signal = 0.0, noise = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        const MeasurementFrame n = add_noise(f, 30.0, noise_seed(3, draw));
        for (int k = 0; k < kFrameSize; ++k) {
            signal += f.values[k] * f.values[k];
            noise += (n.values[k] - f.values[k]) * (n.values[k] - f.values[k]);
        }
    }
    CHECK(std::sqrt(noise / signal) == doctest::Approx(std::pow(10.0, -1.5)).epsilon(0.03));
    CHECK(add_noise(f, 40.0, 9) == add_noise(f, 40.0, 9));
    CHECK(noise_seed(0, 1) != noise_seed(0, 2));
    CHECK(noise_level_name(std::nullopt) == "clean");
    CHECK(noise_level_name(50.0) == "50");
    CHECK(parse_noise_level("clean") == std::nullopt);
    CHECK(*parse_noise_level("40") == 40.0);
    CHECK_THROWS_AS(parse_noise_level("loud"), InputError);
}

TEST_CASE("sample layout and noise buckets") {
    DatasetConfig c = small_config(3, 0);
    CHECK(c.object_count_of(0) == 1);
    CHECK(c.object_count_of(3) == 2);
    CHECK(c.object_count_of(11) == 4);
    CHECK_THROWS_AS(c.object_count_of(12), InputError);
    std::array<int, 4> per{};
    for (int i = 0; i < c.total(); ++i) {
        const NoiseLevel l = c.noise_of(i);
        per[!l ? 0 : *l == 50.0 ? 1 : *l == 40.0 ? 2 : 3] += 1;
    }
    for (int k : per) CHECK(k == 3);
    c.forward_h_mm = 0.6;
    CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("generated dataset files, round trip and determinism") {
    TempDir a("a"), b("b");
    DatasetConfig c = small_config(10, 7);
    const Dataset ds = generate_dataset(c);
    write_dataset(ds, a.path);
    write_splits(stratified_split(c, 7), a.path);
    CHECK(fs::file_size(a.path / "voltages.f32le") == 40u * 104u * 4u);
    CHECK(fs::file_size(a.path / "truths.f32le") == 40u * 4096u * 4u);
    CHECK(fs::file_size(a.path / "masks.u8") == 40u * 4096u);

    const Dataset loaded = load_dataset(a.path);
    CHECK(loaded.voltages == ds.voltages);
    CHECK(loaded.truths == ds.truths);
    CHECK(loaded.masks == ds.masks);
    CHECK(loaded.config.noise_plan == c.noise_plan);
    write_dataset(loaded, b.path);
    for (const char* f : {"manifest.json", "voltages.f32le", "truths.f32le", "masks.u8"})
        CHECK(read_bytes(a.path / f) == read_bytes(b.path / f));
    CHECK(generate_dataset(c, 2).voltages == ds.voltages);

    const SplitIndices s = load_splits(a.path);
    CHECK(s.test.size() == 4);
    CHECK(s.val.size() == 4);
    CHECK(s.train.size() == 32);

    for (int i = 0; i < ds.size(); ++i) {
        const MaskImage m = ds.mask(i);
        const PixelImage t = ds.truth(i);
        for (int p = 0; p < kImagePixels; ++p) REQUIRE((m.data[p] != 0) == (t.data[p] != 0.0));
    }
}

TEST_CASE("dataset loading reports broken inputs") {
    TempDir d("broken");
    DatasetConfig c = small_config(1, 2);
    write_dataset(generate_dataset(c), d.path);
    truncate_file(d.path / "voltages.f32le", 100);
    CHECK_THROWS_WITH_AS(load_dataset(d.path), doctest::Contains("voltages.f32le"), FormatError);

    write_dataset(generate_dataset(c), d.path);
    nlohmann::json j;
    {
        std::ifstream in(d.path / "manifest.json");
        in >> j;
    }
    j["version"] = 99;
    {
        std::ofstream out(d.path / "manifest.json");
        out << j.dump();
    }
    CHECK_THROWS_WITH_AS(load_dataset(d.path), doctest::Contains("version"), FormatError);
    CHECK_THROWS_AS(load_dataset(d.path / "missing"), FormatError);
}

TEST_CASE("raw-domain noise perturbs voltages before normalization") {
    DatasetConfig c = small_config(1, 3);
    c.noise_plan = {30.0};
    const Dataset normalized = generate_dataset(c);
    c.noise_domain = NoiseDomain::Raw;
    const Dataset raw = generate_dataset(c);
    CHECK_FALSE(raw.voltages == normalized.voltages);
    c.noise_plan = {std::nullopt};
    const Dataset clean = generate_dataset(c);
    c.noise_domain = NoiseDomain::Normalized;
    CHECK(generate_dataset(c).voltages == clean.voltages);
}
