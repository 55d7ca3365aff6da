#include "prnu/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "prnu/error.hpp"
#include "prnu/wavelet.hpp"

namespace prnu {

void DenoiseParams::validate() const {
    if (!(sigma > 0.0)) throw ConfigError("denoise: sigma must be > 0");
    if (levels < 1) throw ConfigError("denoise: levels must be >= 1");
    if (window_sides.empty()) throw ConfigError("denoise: no variance windows");
    for (int w : window_sides) {
        if (w < 3 || w % 2 == 0) throw ConfigError("denoise: window sides must be odd and >= 3");
    }
}

namespace {

// Clipped-window mean of squared coefficients via a summed-area table, then
// Wiener gain v/(v + sigma^2) with v the smallest windowed variance estimate.
void attenuate_subband(Matd& band, const std::vector<int>& windows, double sigma_sq) {
    int w = band.width;
    int h = band.height;
    std::vector<double> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
    auto at_integral = [&](int x, int y) -> double& {
        return integral[static_cast<std::size_t>(y) * (w + 1) + x];
    };
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            double c = band.at(x, y);
            row += c * c;
            at_integral(x + 1, y + 1) = at_integral(x + 1, y) + row;
        }
    }

    std::vector<double> min_variance(static_cast<std::size_t>(w) * h,
                                     std::numeric_limits<double>::infinity());
    for (int side : windows) {
        int half = side / 2;
        for (int y = 0; y < h; ++y) {
            int y0 = std::max(0, y - half);
            int y1 = std::min(h - 1, y + half);
            for (int x = 0; x < w; ++x) {
                int x0 = std::max(0, x - half);
                int x1 = std::min(w - 1, x + half);
                double sum = at_integral(x1 + 1, y1 + 1) - at_integral(x0, y1 + 1) -
                             at_integral(x1 + 1, y0) + at_integral(x0, y0);
                double count = static_cast<double>(x1 - x0 + 1) * (y1 - y0 + 1);
                double v = std::max(0.0, sum / count - sigma_sq);
                double& slot = min_variance[static_cast<std::size_t>(y) * w + x];
                slot = std::min(slot, v);
            }
        }
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double v = min_variance[static_cast<std::size_t>(y) * w + x];
            band.at(x, y) *= v / (v + sigma_sq);
        }
    }
}

} // namespace

RasterF32 denoise(const RasterF32& x, const DenoiseParams& p) {
    p.validate();
    WaveletPyramid pyramid = dwt2(x, p.levels);
    double sigma_sq = p.sigma * p.sigma;
    for (auto& level : pyramid.levels) {
        attenuate_subband(level.lh, p.window_sides, sigma_sq);
        attenuate_subband(level.hl, p.window_sides, sigma_sq);
        attenuate_subband(level.hh, p.window_sides, sigma_sq);
    }
    return idwt2(pyramid);
}

RasterF32 residual(const RasterF32& x, const DenoiseParams& p) {
    RasterF32 denoised = denoise(x, p);
    RasterF32 out = make_raster(x.width, x.height);
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        out.samples[i] = x.samples[i] - denoised.samples[i];
    }
    return out;
}

RasterF32 residual(const ImagePlane& x, const DenoiseParams& p) {
    return residual(to_raster(x), p);
}

} // namespace prnu
