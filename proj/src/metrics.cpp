#include "eitfuse/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "eitfuse/error.hpp"

namespace eitfuse {

namespace {

void same_shape(const PixelImage& a, const PixelImage& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw InputError("image sizes differ");
}

// Valid-mode separable filter with a 1D kernel along rows then columns.
Raster<double> filter_valid(const Raster<double>& img, const std::vector<double>& k) {
    const int w = static_cast<int>(k.size());
    const int out_rows = img.rows - w + 1, out_cols = img.cols - w + 1;
    Raster<double> tmp(img.rows, out_cols, 0.0);
    for (int r = 0; r < img.rows; ++r)
        for (int c = 0; c < out_cols; ++c) {
            double s = 0.0;
            for (int j = 0; j < w; ++j) s += k[j] * img.at(r, c + j);
            tmp.at(r, c) = s;
        }
    Raster<double> out(out_rows, out_cols, 0.0);
    for (int r = 0; r < out_rows; ++r)
        for (int c = 0; c < out_cols; ++c) {
            double s = 0.0;
            for (int i = 0; i < w; ++i) s += k[i] * tmp.at(r + i, c);
            out.at(r, c) = s;
        }
    return out;
}

std::vector<double> gaussian_1d(int window, double sigma) {
    std::vector<double> g(window);
    const double mid = (window - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < window; ++i) {
        g[i] = std::exp(-((i - mid) * (i - mid)) / (2.0 * sigma * sigma));
        sum += g[i];
    }
    for (auto& v : g) v /= sum;
    return g;
}

}  // namespace

double rie(const PixelImage& a, const PixelImage& b) {
    same_shape(a, b);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
        den += b.data[i] * b.data[i];
    }
    if (den == 0.0) throw InputError("RIE reference image has zero norm");
    return std::sqrt(num / den);
}

std::vector<double> gaussian_window(int window, double sigma) {
    const auto g = gaussian_1d(window, sigma);
    std::vector<double> w(static_cast<std::size_t>(window) * window);
    for (int i = 0; i < window; ++i)
        for (int j = 0; j < window; ++j) w[i * window + j] = g[i] * g[j];
    return w;
}

Raster<double> ssim_map(const PixelImage& a, const PixelImage& b, const SsimParams& p) {
    same_shape(a, b);
    if (p.window < 1 || a.rows < p.window || a.cols < p.window) {
        throw InputError("image smaller than the SSIM window");
    }
    const auto g = gaussian_1d(p.window, p.sigma);
    Raster<double> aa(a.rows, a.cols), bb(a.rows, a.cols), ab(a.rows, a.cols);
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa.data[i] = a.data[i] * a.data[i];
        bb.data[i] = b.data[i] * b.data[i];
        ab.data[i] = a.data[i] * b.data[i];
    }
    const auto mu_a = filter_valid(a, g);
    const auto mu_b = filter_valid(b, g);
    const auto e_aa = filter_valid(aa, g);
    const auto e_bb = filter_valid(bb, g);
    const auto e_ab = filter_valid(ab, g);
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);

    Raster<double> out(mu_a.rows, mu_a.cols, 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double ma = mu_a.data[i], mb = mu_b.data[i];
        const double va = e_aa.data[i] - ma * ma;
        const double vb = e_bb.data[i] - mb * mb;
        const double cov = e_ab.data[i] - ma * mb;
        out.data[i] = ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                      ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return out;
}

double mssim(const PixelImage& a, const PixelImage& b, const SsimParams& p) {
    const auto map = ssim_map(a, b, p);
    double s = 0.0;
    for (double v : map.data) s += v;
    return s / static_cast<double>(map.size());
}

MetricReport evaluate_batch(const std::vector<PixelImage>& predictions,
                            const std::vector<PixelImage>& truths) {
    if (predictions.size() != truths.size()) throw InputError("prediction and truth counts differ");
    MetricReport rep;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        try {
            rep.rie.push_back(rie(predictions[i], truths[i]));
        } catch (const InputError& e) {
            throw InputError("sample " + std::to_string(i) + ": " + e.what());
        }
        rep.mssim.push_back(mssim(predictions[i], truths[i]));
    }
    for (std::size_t i = 0; i < rep.rie.size(); ++i) {
        rep.mean_rie += rep.rie[i];
        rep.mean_mssim += rep.mssim[i];
    }
    if (!rep.rie.empty()) {
        rep.mean_rie /= static_cast<double>(rep.rie.size());
        rep.mean_mssim /= static_cast<double>(rep.rie.size());
    }
    return rep;
}

void write_report_csv(const MetricReport& report, std::ostream& out) {
    out.imbue(std::locale::classic());
    out << std::setprecision(10);
    out << "index,rie,mssim\n";
    for (std::size_t i = 0; i < report.rie.size(); ++i) {
        const auto idx = report.samples.empty() ? static_cast<long>(i) : report.samples.at(i);
        out << idx << ',' << report.rie[i] << ',' << report.mssim[i] << '\n';
    }
    out << "mean," << report.mean_rie << ',' << report.mean_mssim << '\n';
}

}  // namespace eitfuse
