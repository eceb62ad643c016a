#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "eitfuse/error.hpp"
#include "eitfuse/metrics.hpp"

using namespace eitfuse;

namespace {

PixelImage textured(int side, std::uint64_t seed, double amp = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, amp);
    PixelImage img(side, side);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) img.at(r, c) = 0.5 * std::sin(0.6 * r) * std::cos(0.4 * c) + u(rng);
    return img;
}

// Direct evaluation of the SSIM formula at one window position.
double direct_ssim(const PixelImage& a, const PixelImage& b, int r0, int c0) {
    const auto w = gaussian_window(11, 1.5);
    double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
            const double wt = w[i * 11 + j], x = a.at(r0 + i, c0 + j), y = b.at(r0 + i, c0 + j);
            mx += wt * x;
            my += wt * y;
            sxx += wt * x * x;
            syy += wt * y * y;
            sxy += wt * x * y;
        }
    const double c1 = 1e-4, c2 = 9e-4;
    return (2 * mx * my + c1) * (2 * (sxy - mx * my) + c2) /
           ((mx * mx + my * my + c1) * (sxx - mx * mx + syy - my * my + c2));
}

}  // namespace

TEST_CASE("RIE identities and a hand-computed 4x4 case") {
    const PixelImage a = textured(8, 1);
    CHECK(rie(a, a) == 0.0);
    PixelImage twice = a;
    for (double& v : twice.data) v *= 2.0;
    CHECK(rie(twice, a) == 1.0);
    PixelImage p(4, 4, 0.0), t(4, 4, 0.0);
    t.at(0, 0) = 3.0;
    t.at(1, 1) = 4.0;
    p.at(0, 0) = 3.0;
    p.at(2, 2) = 5.0;
    CHECK(rie(p, t) == doctest::Approx(std::sqrt(16.0 + 25.0) / 5.0));
    CHECK_THROWS_AS(rie(a, PixelImage(8, 8, 0.0)), InputError);
    CHECK_THROWS_AS(rie(a, PixelImage(4, 4, 1.0)), InputError);
}

TEST_CASE("gaussian window is normalized and symmetric") {
    const auto w = gaussian_window(11, 1.5);
    double sum = 0.0;
    for (double v : w) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w[0] == w[120]);
    CHECK(w[5 * 11 + 5] > w[5 * 11 + 4]);
}

TEST_CASE("SSIM map of a textured 16x16 pair matches direct evaluation") {
    const PixelImage a = textured(16, 2), b = textured(16, 3);
    const auto map = ssim_map(a, b);
    CHECK(map.rows == 6);
    CHECK(map.cols == 6);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) CHECK(std::abs(map.at(r, c) - direct_ssim(a, b, r, c)) < 1e-10);
}

TEST_CASE("SSIM limiting cases") {
    const PixelImage a = textured(16, 4);
    for (double v : ssim_map(a, a).data) CHECK(v == 1.0);
    const PixelImage zero(16, 16, 0.0);
    for (double v : ssim_map(zero, zero).data) CHECK(v == 1.0);
    PixelImage pos(16, 16), neg(16, 16);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) {
            pos.at(r, c) = ((r + c) % 2) ? 0.5 : -0.5;
            neg.at(r, c) = -pos.at(r, c);
        }
    CHECK(mssim(pos, neg) < 0.0);
    CHECK_THROWS_AS(mssim(PixelImage(8, 8), PixelImage(8, 8)), InputError);
}

TEST_CASE("MSSIM orders a mild perturbation above a shuffle") {
    PixelImage truth(64, 64, 0.0);
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c)
            if ((r - 30) * (r - 30) + (c - 25) * (c - 25) < 100) truth.at(r, c) = 0.8;
    PixelImage noisy = truth, shuffled = truth;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 0.02);
    for (double& v : noisy.data) v += n(rng);
    std::shuffle(shuffled.data.begin(), shuffled.data.end(), rng);
    CHECK(mssim(noisy, truth) > mssim(shuffled, truth));
}

TEST_CASE("batch report and CSV layout") {
    const PixelImage a = textured(64, 6);
    PixelImage b = a;
    for (double& v : b.data) v *= 2.0;
    const MetricReport rep = evaluate_batch({a, b}, {a, a});
    CHECK(rep.rie[0] == 0.0);
    CHECK(rep.rie[1] == 1.0);
    CHECK(rep.mean_rie == 0.5);
    CHECK(rep.mssim[0] == 1.0);
    std::ostringstream out;
    write_report_csv(rep, out);
    const std::string csv = out.str();
    CHECK(csv.rfind("index,rie,mssim\n0,0,1\n1,1,", 0) == 0);
    CHECK(csv.find("\nmean,0.5,") != std::string::npos);
    CHECK_THROWS_AS(evaluate_batch({a}, {a, a}), InputError);
}
