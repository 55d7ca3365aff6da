#include "prnu/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "prnu/error.hpp"
#include "prnu/image_io.hpp"

namespace prnu {

Fingerprint estimate_fingerprint_from_residuals(std::span<const ImagePlane> images,
                                                std::span<const RasterF32> residuals) {
    if (images.empty()) throw DataError("estimate_fingerprint: empty image set");
    if (images.size() != residuals.size()) {
        throw DataError("estimate_fingerprint: image/residual count mismatch");
    }
    int w = images[0].width;
    int h = images[0].height;
    std::size_t n = images[0].pixel_count();
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].width != w || images[i].height != h || residuals[i].width != w ||
            residuals[i].height != h) {
            throw DataError("estimate_fingerprint: dimension mismatch");
        }
    }

    std::vector<double> numer(n, 0.0);
    std::vector<double> denom(n, 0.0);
    for (std::size_t i = 0; i < images.size(); ++i) {
        const auto& img = images[i].samples;
        const auto& res = residuals[i].samples;
        for (std::size_t px = 0; px < n; ++px) {
            double v = img[px];
            numer[px] += static_cast<double>(res[px]) * v;
            denom[px] += v * v;
        }
    }

    Fingerprint fp;
    fp.raster = make_raster(w, h);
    fp.source_count = static_cast<int>(images.size());
    for (std::size_t px = 0; px < n; ++px) {
        fp.raster.samples[px] =
            denom[px] == 0.0 ? 0.0f : static_cast<float>(numer[px] / denom[px]);
    }
    return fp;
}

Fingerprint estimate_fingerprint(std::span<const ImagePlane> images, const DenoiseParams& p) {
    if (images.empty()) throw DataError("estimate_fingerprint: empty image set");
    std::vector<RasterF32> residuals;
    residuals.reserve(images.size());
    for (const auto& img : images) residuals.push_back(residual(img, p));
    return estimate_fingerprint_from_residuals(images, residuals);
}

double correlation(const RasterF32& a, const RasterF32& b) {
    if (a.width != b.width || a.height != b.height) {
        throw DataError("correlation: dimension mismatch");
    }
    std::size_t n = a.samples.size();
    if (n < 2) throw NumericError("correlation: degenerate input (fewer than 2 samples)");

    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a.samples[i];
        mb += b.samples[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);

    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = a.samples[i] - ma;
        double db = b.samples[i] - mb;
        dot += da * db;
        na += da * da;
        nb += db * db;
    }
    if (na == 0.0 || nb == 0.0) throw NumericError("correlation: degenerate input (zero variance)");
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double detect_with_residual(const ImagePlane& j, const RasterF32& j_residual, const Fingerprint& k) {
    if (j.width != k.width() || j.height != k.height()) {
        throw DataError("detect: dimension mismatch");
    }
    RasterF32 expected = make_raster(j.width, j.height);
    for (std::size_t i = 0; i < expected.samples.size(); ++i) {
        expected.samples[i] = j.samples[i] * k.raster.samples[i];
    }
    return correlation(j_residual, expected);
}

double detect(const ImagePlane& j, const Fingerprint& k, const DenoiseParams& p) {
    return detect_with_residual(j, residual(j, p), k);
}

DetectorModel calibrate_threshold(std::vector<double> negatives, double pfa) {
    if (negatives.empty()) throw DataError("calibrate_threshold: empty negatives");
    if (!(pfa > 0.0 && pfa < 1.0)) throw ConfigError("calibrate_threshold: pfa outside (0,1)");

    DetectorModel model;
    model.target_pfa = pfa;
    model.negative_scores = negatives;

    std::sort(negatives.begin(), negatives.end());
    auto m = static_cast<double>(negatives.size());
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - pfa) * m));
    rank = std::clamp<std::size_t>(rank, 1, negatives.size());
    model.threshold = negatives[rank - 1];
    return model;
}

void save_detector_model(const DetectorModel& model, const std::string& path) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["threshold"] = model.threshold;
    j["target_pfa"] = model.target_pfa;
    j["negative_count"] = model.negative_scores.size();
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

DetectorModel load_detector_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("unreadable file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad detector model JSON: " + std::string(e.what()));
    }
    DetectorModel model;
    model.threshold = j.at("threshold").get<double>();
    model.target_pfa = j.at("target_pfa").get<double>();
    return model;
}

void save_fingerprint(const Fingerprint& fp, const std::string& path) {
    save_raster(fp.raster, path);
}

} // namespace prnu
