#pragma once

#include <span>
#include <string>
#include <vector>

#include "prnu/denoise.hpp"
#include "prnu/image.hpp"

namespace prnu {

/// Multiplicative PRNU factor estimate.
struct Fingerprint {
    RasterF32 raster;
    int source_count = 0;

    int width() const { return raster.width; }
    int height() const { return raster.height; }
};

/// Correlation threshold calibrated to a target false-alarm rate.
struct DetectorModel {
    double threshold = 0.0;
    double target_pfa = 0.0;
    std::vector<double> negative_scores;
};

/// K = sum(W_i * I_i) / sum(I_i^2) element-wise over pre-extracted residuals.
/// Pixels whose denominator is zero map to 0.
Fingerprint estimate_fingerprint_from_residuals(std::span<const ImagePlane> images,
                                                std::span<const RasterF32> residuals);

/// Same estimator with residuals extracted internally.
Fingerprint estimate_fingerprint(std::span<const ImagePlane> images, const DenoiseParams& p);

/// Pearson correlation of two equal-sized rasters. Throws NumericError
/// ("degenerate input") when either input has zero variance.
double correlation(const RasterF32& a, const RasterF32& b);

/// Correlation detector: corr(residual(J), J*K) with element-wise product.
double detect(const ImagePlane& j, const Fingerprint& k, const DenoiseParams& p);

/// As detect() but with the residual supplied by the caller.
double detect_with_residual(const ImagePlane& j, const RasterF32& j_residual, const Fingerprint& k);

/// Smallest threshold t such that the fraction of negatives strictly above t
/// is at most pfa: the ceil((1-pfa)*M)-th ascending order statistic.
DetectorModel calibrate_threshold(std::vector<double> negatives, double pfa);

void save_detector_model(const DetectorModel& model, const std::string& path);
DetectorModel load_detector_model(const std::string& path);

void save_fingerprint(const Fingerprint& fp, const std::string& path);

} // namespace prnu
