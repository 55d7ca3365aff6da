#pragma once

#include <vector>

#include "prnu/image.hpp"

namespace prnu {

/// Dense double-precision matrix used for wavelet coefficients.
struct Matd {
    int width = 0;
    int height = 0;
    std::vector<double> v; // row-major

    double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
};

Matd make_matd(int width, int height, double fill = 0.0);

/// Separable 2-D decomposition with the orthonormal 8-tap Daubechies filter.
/// levels[0] is the finest scale. src_w/src_h record the input size of each
/// level so synthesis can crop planes that were edge-extended to even size.
struct WaveletPyramid {
    struct Level {
        Matd lh; // horizontal detail (lowpass rows, highpass columns)
        Matd hl; // vertical detail
        Matd hh; // diagonal detail
        int src_w = 0;
        int src_h = 0;
    };
    std::vector<Level> levels;
    Matd ll;
};

WaveletPyramid dwt2(const RasterF32& x, int levels);
RasterF32 idwt2(const WaveletPyramid& pyramid);

} // namespace prnu
