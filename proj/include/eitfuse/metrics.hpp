#pragma once

#include <iosfwd>
#include <vector>

#include "eitfuse/raster.hpp"

namespace eitfuse {

/// |a - b|_2 / |b|_2 over every pixel. Throws InputError when |b| = 0.
double rie(const PixelImage& a, const PixelImage& b);

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Normalized 2D Gaussian window (window x window), row-major.
std::vector<double> gaussian_window(int window, double sigma);

/// SSIM at every position where the window fits; (rows-w+1) x (cols-w+1).
Raster<double> ssim_map(const PixelImage& a, const PixelImage& b, const SsimParams& p = {});
double mssim(const PixelImage& a, const PixelImage& b, const SsimParams& p = {});

struct MetricReport {
    std::vector<int> samples;  // dataset index per row; empty means 0..n-1
    std::vector<double> rie;
    std::vector<double> mssim;
    double mean_rie = 0.0;
    double mean_mssim = 0.0;
};

MetricReport evaluate_batch(const std::vector<PixelImage>& predictions,
                            const std::vector<PixelImage>& truths);

/// `index,rie,mssim` rows (index from `samples` when set), then a `mean` row.
void write_report_csv(const MetricReport& report, std::ostream& out);

}  // namespace eitfuse
