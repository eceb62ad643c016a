#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "eitfuse/error.hpp"
#include "eitfuse/guidance.hpp"
#include "eitfuse/morphology.hpp"
#include "eitfuse/phantoms.hpp"

using namespace eitfuse;

namespace {

BinaryImage random_pattern(int side, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution bit(0.55);
    BinaryImage img(side, side);
    for (auto& v : img.data) v = bit(rng);
    return img;
}

int count(const BinaryImage& img) {
    int s = 0;
    for (auto v : img.data) s += v;
    return s;
}

RgbImage solid(int side, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RgbImage img(side, side);
    for (int i = 0; i < side * side; ++i) {
        img.rgb[3 * i] = r;
        img.rgb[3 * i + 1] = g;
        img.rgb[3 * i + 2] = b;
    }
    return img;
}

}  // namespace

TEST_CASE("structuring elements and trivial morphology cases") {
    const auto se = StructuringElement::box(3);
    CHECK(se.offsets().size() == 9);
    BinaryImage dot(7, 7, 0);
    dot.at(3, 3) = 1;
    CHECK(count(open(dot, se)) == 0);
    const BinaryImage grown = dilate(dot, se);
    CHECK(count(grown) == 9);
    CHECK(grown.at(2, 2) == 1);
    CHECK(grown.at(4, 4) == 1);
    BinaryImage block(9, 9, 0);
    for (int r = 2; r < 7; ++r)
        for (int c = 2; c < 7; ++c) block.at(r, c) = 1;
    CHECK(open(block, se) == block);
    CHECK(count(dilate(BinaryImage(5, 5, 0), se)) == 0);
    CHECK_THROWS_AS(StructuringElement::box(2), InputError);
}

TEST_CASE("morphology matches set definitions on random 8x8 patterns") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const BinaryImage img = random_pattern(8, seed);
        StructuringElement se;
        se.pattern = BinaryImage(3, 2, 0);
        se.pattern.at(0, 0) = se.pattern.at(1, 1) = se.pattern.at(2, 0) = 1;
        se.origin_row = 1;
        se.origin_col = 0;
        BinaryImage er(8, 8, 0), di(8, 8, 0), op(8, 8, 0);
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c) {
                bool all = true, any = false;
                for (const auto& o : se.offsets()) {
                    all = all && img.contains(r + o.dr, c + o.dc) && img.at(r + o.dr, c + o.dc);
                    any = any || (img.contains(r - o.dr, c - o.dc) && img.at(r - o.dr, c - o.dc));
                }
                er.at(r, c) = all;
                di.at(r, c) = any;
            }
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c)
                if (er.at(r, c))
                    for (const auto& o : se.offsets()) op.at(r + o.dr, c + o.dc) = 1;
        CHECK(erode(img, se) == er);
        CHECK(dilate(img, se) == di);
        CHECK(open(img, se) == op);
    }
}

TEST_CASE("log-chromaticity projection") {
    const auto gray = log_chromaticity(90, 90, 90);
    CHECK(gray[0] == 0.0);
    CHECK(gray[1] == 0.0);
    CHECK(invariant_image(solid(4, 77, 77, 77), 37.0).data[0] == 1.0);
    // Hand evaluation for (200, 100, 50) at 30 degrees.
    const double g = std::cbrt(200.0 * 100.0 * 50.0);
    const double r1 = std::log(200.0 / g), r2 = std::log(100.0 / g), r3 = std::log(50.0 / g);
    const double c1 = (r1 - r2) / std::sqrt(2.0), c2 = (r1 + r2 - 2.0 * r3) / std::sqrt(6.0);
    const double expected = std::exp(c1 * std::cos(std::numbers::pi / 6.0) + c2 * std::sin(std::numbers::pi / 6.0));
    CHECK(invariant_image(solid(2, 200, 100, 50), 30.0).data[3] == doctest::Approx(expected).epsilon(1e-12));
    // Channels are clamped to 1 before taking logarithms.
    const auto dark = log_chromaticity(0, 1, 1);
    CHECK(dark[0] == 0.0);
}

TEST_CASE("projection entropy cases") {
    CHECK(projection_entropy(std::vector<double>(100, 2.5)) == 0.0);
    std::vector<double> two(200);
    for (std::size_t i = 0; i < two.size(); ++i) two[i] = i % 2 ? 10.0 : 0.0;
    CHECK(projection_entropy(two) == doctest::Approx(1.0).epsilon(1e-12));

    // Direct recomputation over the documented binning.
    std::mt19937_64 rng(3);
    std::normal_distribution<double> a(0.0, 1.0), b(6.0, 0.5);
    std::vector<double> v;
    for (int i = 0; i < 3000; ++i) v.push_back(i % 3 ? a(rng) : b(rng));
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    const auto lo = static_cast<std::size_t>(std::floor(0.05 * (n - 1)));
    const auto hi = static_cast<std::size_t>(std::ceil(0.95 * (n - 1)));
    double mean = 0, var = 0;
    for (std::size_t i = lo; i <= hi; ++i) mean += s[i];
    mean /= static_cast<double>(hi - lo + 1);
    for (std::size_t i = lo; i <= hi; ++i) var += (s[i] - mean) * (s[i] - mean);
    var /= static_cast<double>(hi - lo + 1);
    const double width = 3.5 * std::sqrt(var) / std::cbrt(static_cast<double>(hi - lo + 1));
    const auto bins = static_cast<std::size_t>(std::ceil((s[hi] - s[lo]) / width));
    std::vector<double> hist(bins, 0.0);
    for (std::size_t i = lo; i <= hi; ++i)
        hist[std::min(bins - 1, static_cast<std::size_t>((s[i] - s[lo]) / width))] += 1.0;
    double h = 0.0;
    for (double k : hist)
        if (k > 0) h -= k / (hi - lo + 1) * std::log2(k / (hi - lo + 1));
    CHECK(std::abs(projection_entropy(v) - h) < 1e-12);
}

TEST_CASE("theta search covers 180 integer angles") {
    const auto h = theta_entropies(solid(40, 120, 120, 120));
    CHECK(h.size() == 180);
    for (double v : h) CHECK(v == 0.0);
    CHECK(select_theta(solid(40, 120, 120, 120)) == 1);
}

TEST_CASE("theta selection agrees with a fine-grid search") {
    // Chromaticity scatter along a known direction phi; minimum entropy is orthogonal to it.
    const double phi = 0.7;
    const int side = 120;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> t(-0.6, 0.6);
    std::normal_distribution<double> jitter(0.0, 0.004);
    RgbImage img(side, side);
    std::vector<std::array<double, 2>> chi;
    for (int i = 0; i < side * side; ++i) {
        const double s = t(rng);
        const double x1 = s * std::cos(phi) + jitter(rng), x2 = s * std::sin(phi) + jitter(rng);
        // Invert the chromaticity transform with geometric mean 128.
        const double l1 = x1 / std::sqrt(2.0) + x2 / std::sqrt(6.0);
        const double l2 = -x1 / std::sqrt(2.0) + x2 / std::sqrt(6.0);
        const double l3 = -2.0 * x2 / std::sqrt(6.0);
        img.rgb[3 * i] = static_cast<std::uint8_t>(std::lround(std::clamp(128.0 * std::exp(l1), 1.0, 255.0)));
        img.rgb[3 * i + 1] = static_cast<std::uint8_t>(std::lround(std::clamp(128.0 * std::exp(l2), 1.0, 255.0)));
        img.rgb[3 * i + 2] = static_cast<std::uint8_t>(std::lround(std::clamp(128.0 * std::exp(l3), 1.0, 255.0)));
    }
    const BinaryImage fov = inscribed_circle(side, side);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c)
            if (fov.at(r, c)) {
                const auto* p = img.pixel(r, c);
                chi.push_back(log_chromaticity(p[0], p[1], p[2]));
            }
    double best_angle = 0.0, best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 1800; ++k) {
        const double th = k * 0.1 * std::numbers::pi / 180.0;
        std::vector<double> v;
        for (const auto& x : chi) v.push_back(std::exp(x[0] * std::cos(th) + x[1] * std::sin(th)));
        const double e = projection_entropy(v);
        if (e < best) {
            best = e;
            best_angle = k * 0.1;
        }
    }
    const int theta = select_theta(img);
    const double d = std::abs(theta - best_angle);
    CHECK(std::min(d, 180.0 - d) <= 2.0);
}

TEST_CASE("threshold cases") {
    GrayImage g(1, 3);
    g.data = {0.4, 0.5, 0.6};
    const BinaryImage t = threshold_image(g, 0.5);
    CHECK(t.data == std::vector<std::uint8_t>{0, 1, 1});
    for (double beta : {0.66, 0.45, 0.5}) CHECK_NOTHROW(threshold_image(g, beta));
    for (auto v : threshold_image(g, -1.0).data) CHECK(v == 1);
    CHECK_THROWS_AS(threshold_image(g, std::nan("")), InputError);
}

TEST_CASE("downsampling to 64x64") {
    const BinaryImage full(406, 406, 1);
    const MaskImage m = downsample_mask(full);
    CHECK(m.rows == 64);
    const PixelGrid grid{64, 1.0};
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c) CHECK(m.at(r, c) == (grid.in_circle(r, c) ? 1 : 0));
    BinaryImage left(406, 406, 0);
    for (int r = 0; r < 406; ++r)
        for (int c = 0; c < 203; ++c) left.at(r, c) = 1;
    const MaskImage lm = downsample_mask(left);
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c)
            if (grid.in_circle(r, c) && c != 31 && c != 32) CHECK(lm.at(r, c) == (c < 32 ? 1 : 0));
}

TEST_CASE("synthetic guidance renderer") {
    const SensorGeometry geom;
    const PhantomScene scene = sample_phantom(21, 2, geom);
    GuidanceStyle quiet;
    quiet.noise_sigma = 0.0;
    const RgbImage img = synth_guidance(scene, 7.0, 1, 0.0, quiet);
    CHECK(img.rows == 406);
    CHECK(img.rgb.size() == 406u * 406u * 3u);
    std::set<std::array<std::uint8_t, 3>> colors;
    int object = 0;
    const BinaryImage fov = inscribed_circle(406, 406);
    int inside = 0;
    for (int r = 0; r < 406; ++r)
        for (int c = 0; c < 406; ++c) {
            const auto* p = img.pixel(r, c);
            colors.insert({p[0], p[1], p[2]});
            if (!fov.at(r, c)) continue;
            ++inside;
            if (p[0] == 90) ++object;
        }
    CHECK(colors.size() == 2);
    double area = 0.0;
    for (const auto& inc : scene.inclusions) area += std::numbers::pi * inc.radius_mm * inc.radius_mm;
    CHECK(std::abs(static_cast<double>(object) / inside - area / (std::numbers::pi * 49.0)) < 0.02);
    CHECK(synth_guidance(scene, 7.0, 4, 0.2) == synth_guidance(scene, 7.0, 4, 0.2));
}

TEST_CASE("guidance pipeline on synthetic and blank images") {
    const SensorGeometry geom;
    const PixelGrid grid{64, 7.0};
    const PhantomScene scene = sample_phantom(33, 2, geom);
    const RgbImage img = synth_guidance(scene, 7.0, 33, 0.25);
    const GuidanceResult res = run_guidance(img);
    CHECK(res.inverted);
    CHECK(mask_iou(res.mask, mask_image(scene, grid)) >= 0.8);
    CHECK(process_guidance(img) == res.mask);
    CHECK(count(process_guidance(solid(406, 200, 190, 180))) == 0);
    GuidanceOptions keep;
    keep.polarity = Polarity::Keep;
    keep.theta_deg = res.theta_deg;
    CHECK_FALSE(run_guidance(img, keep).inverted);
    keep.theta_deg = 0;
    CHECK_THROWS_AS(run_guidance(img, keep), InputError);
}
