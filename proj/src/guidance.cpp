#include "eitfuse/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "eitfuse/error.hpp"

namespace eitfuse {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void check_rgb(const RgbImage& img) {
    if (img.rows <= 0 || img.cols <= 0 ||
        img.rgb.size() != static_cast<std::size_t>(img.rows) * img.cols * 3) {
        throw InputError("malformed RGB image");
    }
}

}  // namespace

BinaryImage inscribed_circle(int rows, int cols) {
    BinaryImage out(rows, cols, 0);
    const double cy = rows / 2.0, cx = cols / 2.0;
    const double rad = std::min(rows, cols) / 2.0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double dy = r + 0.5 - cy, dx = c + 0.5 - cx;
            out.at(r, c) = dx * dx + dy * dy <= rad * rad ? 1 : 0;
        }
    }
    return out;
}

std::array<double, 2> log_chromaticity(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double lr = std::log(std::max<double>(r, 1.0));
    const double lg = std::log(std::max<double>(g, 1.0));
    const double lb = std::log(std::max<double>(b, 1.0));
    const double mean = (lr + lg + lb) / 3.0;  // log of the geometric mean
    const double rho_r = lr - mean, rho_g = lg - mean, rho_b = lb - mean;
    return {(rho_r - rho_g) / std::sqrt(2.0), (rho_r + rho_g - 2.0 * rho_b) / std::sqrt(6.0)};
}

GrayImage invariant_image(const RgbImage& img, double theta_deg) {
    check_rgb(img);
    const double ct = std::cos(theta_deg * kDegToRad);
    const double st = std::sin(theta_deg * kDegToRad);
    GrayImage out(img.rows, img.cols, 0.0);
    for (int r = 0; r < img.rows; ++r) {
        for (int c = 0; c < img.cols; ++c) {
            const std::uint8_t* p = img.pixel(r, c);
            const auto chi = log_chromaticity(p[0], p[1], p[2]);
            out.at(r, c) = std::exp(chi[0] * ct + chi[1] * st);
        }
    }
    return out;
}

double projection_entropy(std::vector<double> values) {
    if (values.empty()) throw InputError("entropy of an empty sample");
    const std::size_t n = values.size();
    const auto lo_i = static_cast<std::size_t>(std::floor(0.05 * static_cast<double>(n - 1)));
    const auto hi_i = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n - 1)));
    // Order statistics lo_i and hi_i in place; [lo_i, hi_i] then holds the middle values.
    const auto first = values.begin();
    std::nth_element(first, first + static_cast<std::ptrdiff_t>(lo_i), values.end());
    if (hi_i > lo_i) std::nth_element(first + static_cast<std::ptrdiff_t>(lo_i + 1), first + static_cast<std::ptrdiff_t>(hi_i), values.end());
    const double lo = values[lo_i];
    const double hi = values[hi_i];
    const std::size_t count = hi_i - lo_i + 1;
    if (!(hi > lo)) return 0.0;

    double mean = 0.0;
    for (std::size_t i = lo_i; i <= hi_i; ++i) mean += values[i];
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (std::size_t i = lo_i; i <= hi_i; ++i) var += (values[i] - mean) * (values[i] - mean);
    var /= static_cast<double>(count);
    const double width = 3.5 * std::sqrt(var) / std::cbrt(static_cast<double>(count));
    const auto bins = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / width)));

    std::vector<std::size_t> hist(bins, 0);
    for (std::size_t i = lo_i; i <= hi_i; ++i) {
        auto b = static_cast<std::size_t>((values[i] - lo) / width);
        hist[std::min(b, bins - 1)] += 1;
    }
    double h = 0.0;
    for (std::size_t k : hist) {
        if (k == 0) continue;
        const double p = static_cast<double>(k) / static_cast<double>(count);
        h -= p * std::log2(p);
    }
    return h;
}

double projection_entropy(const GrayImage& gray, const BinaryImage& support) {
    std::vector<double> values;
    values.reserve(gray.size());
    const bool all = support.size() == 0;
    if (!all && (support.rows != gray.rows || support.cols != gray.cols)) {
        throw InputError("support mask size mismatch");
    }
    for (std::size_t i = 0; i < gray.size(); ++i) {
        if (all || support.data[i]) values.push_back(gray.data[i]);
    }
    return projection_entropy(std::move(values));
}

std::array<double, 180> theta_entropies(const RgbImage& img) {
    check_rgb(img);
    const BinaryImage fov = inscribed_circle(img.rows, img.cols);
    std::vector<std::array<double, 2>> chi;
    chi.reserve(img.rows * static_cast<std::size_t>(img.cols));
    for (int r = 0; r < img.rows; ++r) {
        for (int c = 0; c < img.cols; ++c) {
            if (!fov.at(r, c)) continue;
            const std::uint8_t* p = img.pixel(r, c);
            chi.push_back(log_chromaticity(p[0], p[1], p[2]));
        }
    }
    std::array<double, 180> out{};
    std::vector<double> values(chi.size());
    for (int t = 1; t <= 180; ++t) {
        const double ct = std::cos(t * kDegToRad), st = std::sin(t * kDegToRad);
        for (std::size_t i = 0; i < chi.size(); ++i) values[i] = std::exp(chi[i][0] * ct + chi[i][1] * st);
        out[t - 1] = projection_entropy(values);
    }
    return out;
}

int select_theta(const RgbImage& img) {
    const auto h = theta_entropies(img);
    int best = 1;
    for (int t = 2; t <= 180; ++t) {
        if (h[t - 1] < h[best - 1]) best = t;
    }
    return best;
}

BinaryImage threshold_image(const GrayImage& gray, double beta) {
    if (!std::isfinite(beta)) throw InputError("threshold must be finite");
    BinaryImage out(gray.rows, gray.cols, 0);
    for (std::size_t i = 0; i < gray.size(); ++i) out.data[i] = gray.data[i] < beta ? 0 : 1;
    return out;
}

MaskImage downsample_mask(const BinaryImage& img, int side) {
    if (img.rows <= 0 || img.cols <= 0) throw InputError("empty binary image");
    MaskImage out(side, side, 0);
    const PixelGrid grid{side, 1.0};
    const double sy = static_cast<double>(img.rows) / side;
    const double sx = static_cast<double>(img.cols) / side;
    for (int r = 0; r < side; ++r) {
        const double y0 = r * sy, y1 = (r + 1) * sy;
        for (int c = 0; c < side; ++c) {
            if (!grid.in_circle(r, c)) continue;
            const double x0 = c * sx, x1 = (c + 1) * sx;
            double covered = 0.0;
            for (int rr = static_cast<int>(std::floor(y0)); rr < static_cast<int>(std::ceil(y1)); ++rr) {
                const double wy = std::min<double>(rr + 1, y1) - std::max<double>(rr, y0);
                for (int cc = static_cast<int>(std::floor(x0)); cc < static_cast<int>(std::ceil(x1)); ++cc) {
                    if (!img.at(rr, cc)) continue;
                    covered += wy * (std::min<double>(cc + 1, x1) - std::max<double>(cc, x0));
                }
            }
            out.at(r, c) = covered / (sx * sy) >= 0.5 ? 1 : 0;
        }
    }
    return out;
}

GuidanceResult run_guidance(const RgbImage& img, const GuidanceOptions& options) {
    check_rgb(img);
    GuidanceResult res;
    res.theta_deg = options.theta_deg ? *options.theta_deg : select_theta(img);
    if (res.theta_deg < 1 || res.theta_deg > 180) throw InputError("theta must lie in [1, 180] degrees");
    res.invariant = invariant_image(img, res.theta_deg);

    const BinaryImage fov = inscribed_circle(img.rows, img.cols);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < res.invariant.size(); ++i) {
        if (!fov.data[i]) continue;
        lo = std::min(lo, res.invariant.data[i]);
        hi = std::max(hi, res.invariant.data[i]);
    }
    res.normalized = GrayImage(img.rows, img.cols, 0.0);
    if (hi > lo) {
        for (std::size_t i = 0; i < res.invariant.size(); ++i) {
            res.normalized.data[i] = std::clamp((res.invariant.data[i] - lo) / (hi - lo), 0.0, 1.0);
        }
    }

    res.thresholded = threshold_image(res.normalized, options.beta);
    std::size_t inside = 0, on = 0;
    for (std::size_t i = 0; i < fov.size(); ++i) {
        if (!fov.data[i]) continue;
        ++inside;
        on += res.thresholded.data[i];
    }
    switch (options.polarity) {
        case Polarity::Invert: res.inverted = true; break;
        case Polarity::Keep: res.inverted = false; break;
        case Polarity::Auto: res.inverted = 2 * on > inside; break;
    }
    BinaryImage foreground = res.thresholded;
    for (std::size_t i = 0; i < foreground.size(); ++i) {
        const std::uint8_t v = res.inverted ? 1 - foreground.data[i] : foreground.data[i];
        foreground.data[i] = fov.data[i] ? v : 0;
    }
    res.cleaned = dilate(open(foreground, options.element), options.element);
    res.mask = downsample_mask(res.cleaned);
    return res;
}

MaskImage process_guidance(const RgbImage& img, const GuidanceOptions& options) {
    return run_guidance(img, options).mask;
}

RgbImage synth_guidance(const PhantomScene& scene, double radius_mm, std::uint64_t seed,
                        double shade_strength, const GuidanceStyle& style) {
    if (!(shade_strength >= 0.0 && shade_strength <= 1.0)) {
        throw InputError("shade strength must lie in [0, 1]");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double dir = 2.0 * std::numbers::pi * unit(rng);
    const double ux = std::cos(dir), uy = std::sin(dir);
    std::normal_distribution<double> noise(0.0, style.noise_sigma);
    const bool noisy = style.noise_sigma > 0.0;

    const int n = kGuidanceSide;
    const double px = 2.0 * radius_mm / n;
    RgbImage img(n, n);
    for (int r = 0; r < n; ++r) {
        const double y = radius_mm - (r + 0.5) * px;
        for (int c = 0; c < n; ++c) {
            const double x = -radius_mm + (c + 0.5) * px;
            bool object = false;
            for (const auto& inc : scene.inclusions) {
                if (inc.contains(x, y)) {
                    object = true;
                    break;
                }
            }
            // Illumination falls linearly from 1 to 1 - s across the field of view.
            const double t = std::clamp(0.5 * (1.0 + (x * ux + y * uy) / radius_mm), 0.0, 1.0);
            const double light = 1.0 - shade_strength * t;
            const auto& base = object ? style.object : style.background;
            std::uint8_t* p = img.pixel(r, c);
            for (int k = 0; k < 3; ++k) {
                double v = base[k] * std::pow(light, style.shade_exponent[k]);
                if (noisy) v += noise(rng);
                p[k] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return img;
}

}  // namespace eitfuse
