#pragma once

#include <vector>

#include "prnu/image.hpp"

namespace prnu {

/// Wavelet-domain Wiener filter settings. sigma is the assumed noise standard
/// deviation in pixel units (the orthonormal transform keeps white noise
/// variance unchanged across subbands).
struct DenoiseParams {
    double sigma = 5.0;
    int levels = 4;
    std::vector<int> window_sides = {3, 5, 7, 9};

    void validate() const;
};

/// Standard extraction setting used for fingerprint estimation and detection.
inline DenoiseParams extraction_params(double sigma = 5.0) {
    DenoiseParams p;
    p.sigma = sigma;
    return p;
}

/// Wiener-attenuates every detail coefficient by v/(v + sigma^2) where v is
/// the smallest windowed variance estimate max(0, local_mean_of_squares - sigma^2).
/// The approximation band passes through.
RasterF32 denoise(const RasterF32& x, const DenoiseParams& p);

/// Noise residual x - denoise(x).
RasterF32 residual(const ImagePlane& x, const DenoiseParams& p);
RasterF32 residual(const RasterF32& x, const DenoiseParams& p);

} // namespace prnu
