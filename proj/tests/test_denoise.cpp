#include <doctest.h>

#include <cmath>

#include "prnu/denoise.hpp"
#include "prnu/error.hpp"
#include "prnu/fingerprint.hpp"
#include "prnu/rng.hpp"
#include "prnu/sensor_sim.hpp"

using namespace prnu;

namespace {

RasterF32 random_plane(int w, int h, std::uint64_t seed, float base = 128.0f, float scale = 30.0f) {
    Rng rng(seed);
    RasterF32 r = make_raster(w, h);
    for (auto& v : r.samples) v = base + scale * static_cast<float>(rng.next_gaussian());
    return r;
}

double max_abs_diff(const RasterF32& a, const RasterF32& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        m = std::max(m, std::abs(static_cast<double>(a.samples[i]) - b.samples[i]));
    }
    return m;
}

double variance(const RasterF32& x) {
    double m = 0.0;
    for (float v : x.samples) m += v;
    m /= static_cast<double>(x.samples.size());
    double s = 0.0;
    for (float v : x.samples) s += (v - m) * (v - m);
    return s / static_cast<double>(x.samples.size());
}

double energy(const RasterF32& x) {
    double e = 0.0;
    for (float v : x.samples) e += static_cast<double>(v) * v;
    return e;
}

} // namespace

TEST_CASE("vanishing sigma leaves the input unchanged") {
    RasterF32 x = random_plane(64, 64, 1);
    DenoiseParams p;
    p.sigma = 1e-6;
    RasterF32 y = denoise(x, p);
    CHECK(max_abs_diff(x, y) <= 1e-3);
}

TEST_CASE("constant plane passes through the filter") {
    RasterF32 x = make_raster(64, 64, 93.0f);
    DenoiseParams p;
    p.sigma = 5.0;
    RasterF32 y = denoise(x, p);
    CHECK(max_abs_diff(x, y) <= 1e-4);

    ImagePlane plane = round_truncate(x);
    RasterF32 res = residual(plane, p);
    for (float v : res.samples) CHECK(std::abs(v) <= 1e-4);
}

TEST_CASE("white noise at matched sigma is strongly suppressed") {
    RasterF32 x = random_plane(128, 128, 2, 0.0f, 5.0f);
    DenoiseParams p;
    p.sigma = 5.0;
    RasterF32 y = denoise(x, p);
    CHECK(variance(y) < 0.25 * variance(x));
}

TEST_CASE("residual plus denoised equals the input exactly") {
    RasterF32 x = random_plane(64, 48, 3);
    DenoiseParams p;
    RasterF32 den = denoise(x, p);
    RasterF32 res = residual(x, p);
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
        CHECK(res.samples[i] + den.samples[i] == x.samples[i]);
    }
}

TEST_CASE("residual recomputation is deterministic") {
    RasterF32 x = random_plane(32, 32, 4);
    DenoiseParams p;
    RasterF32 first = residual(x, p);
    RasterF32 second = residual(x, p);
    CHECK(first.samples == second.samples);
}

TEST_CASE("adding a constant shifts the output by the same constant") {
    RasterF32 x = random_plane(64, 64, 5);
    DenoiseParams p;
    RasterF32 base = denoise(x, p);
    RasterF32 shifted = x;
    for (auto& v : shifted.samples) v += 25.0f;
    RasterF32 out = denoise(shifted, p);
    double worst = 0.0;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        worst = std::max(worst, std::abs(static_cast<double>(out.samples[i]) - base.samples[i] - 25.0));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("residual energy grows with assumed sigma") {
    RasterF32 x = random_plane(64, 64, 6);
    double prev = -1.0;
    for (double sigma : {1.0, 3.0, 5.0}) {
        DenoiseParams p;
        p.sigma = sigma;
        double e = energy(residual(x, p));
        CHECK(e >= prev);
        prev = e;
    }
}

TEST_CASE("residual correlates with the true PRNU signal") {
    // Synthetic capture I = [I0 (1 + K) + noise]; the residual should align
    // with I0*K far better than with an independent fingerprint.
    int w = 128;
    int h = 128;
    SyntheticCamera cam = make_camera("a", w, h, 0.02, 2.0, 0.0, 99);
    SyntheticCamera other = make_camera("b", w, h, 0.02, 2.0, 0.0, 100);
    SceneSpec scene = flat_scene(w, h, 128.0, 7);
    ImagePlane img = capture(cam, scene);

    DenoiseParams p;
    RasterF32 res = residual(img, p);

    RasterF32 signal_true = make_raster(w, h);
    RasterF32 signal_other = make_raster(w, h);
    RasterF32 radiance = render_scene(scene);
    for (std::size_t i = 0; i < signal_true.samples.size(); ++i) {
        signal_true.samples[i] = radiance.samples[i] * cam.prnu.samples[i];
        signal_other.samples[i] = radiance.samples[i] * other.prnu.samples[i];
    }
    double c_true = correlation(res, signal_true);
    double c_other = correlation(res, signal_other);
    CHECK(c_true > c_other);
    CHECK(c_true > 0.2);
    CHECK(std::abs(c_other) < 0.05);
}

TEST_CASE("invalid parameters are rejected") {
    DenoiseParams p;
    p.sigma = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.sigma = 5.0;
    p.window_sides = {4};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.window_sides = {3, 5};
    p.levels = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("too-small planes propagate the depth error") {
    RasterF32 x = random_plane(8, 8, 8);
    DenoiseParams p; // 4 levels needs >= 16
    CHECK_THROWS_AS(denoise(x, p), DataError);
}
