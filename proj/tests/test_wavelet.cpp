#include <doctest.h>

#include <cmath>
#include <tuple>
#include <vector>

#include "prnu/error.hpp"
#include "prnu/rng.hpp"
#include "prnu/wavelet.hpp"

using namespace prnu;

namespace {

RasterF32 random_plane(int w, int h, std::uint64_t seed, float base = 128.0f, float scale = 40.0f) {
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

double energy(const Matd& m) {
    double e = 0.0;
    for (double v : m.v) e += v * v;
    return e;
}

} // namespace

TEST_CASE("perfect reconstruction on random 64x64 at 4 levels") {
    RasterF32 x = random_plane(64, 64, 1);
    RasterF32 back = idwt2(dwt2(x, 4));
    CHECK(max_abs_diff(x, back) <= 1e-4);
}

TEST_CASE("perfect reconstruction on odd and non-square sizes") {
    std::vector<std::tuple<int, int, int>> cases = {{65, 37, 2}, {33, 48, 3}, {97, 96, 3}};
    for (auto [w, h, levels] : cases) {
        RasterF32 x = random_plane(w, h, static_cast<std::uint64_t>(w * 1000 + h));
        RasterF32 back = idwt2(dwt2(x, levels));
        CAPTURE(w);
        CAPTURE(h);
        CHECK(max_abs_diff(x, back) <= 1e-4);
    }
}

TEST_CASE("constant plane has vanishing detail subbands") {
    RasterF32 x = make_raster(64, 64, 77.5f);
    WaveletPyramid p = dwt2(x, 4);
    for (const auto& level : p.levels) {
        for (const Matd* band : {&level.lh, &level.hl, &level.hh}) {
            for (double v : band->v) CHECK(std::abs(v) <= 1e-6);
        }
    }
}

TEST_CASE("transform conserves energy on even dimensions") {
    RasterF32 x = random_plane(64, 64, 2);
    WaveletPyramid p = dwt2(x, 4);
    double coeff_energy = energy(p.ll);
    for (const auto& level : p.levels) {
        coeff_energy += energy(level.lh) + energy(level.hl) + energy(level.hh);
    }
    double input_energy = 0.0;
    for (float v : x.samples) input_energy += static_cast<double>(v) * v;
    CHECK(std::abs(coeff_energy - input_energy) / input_energy <= 1e-3);
}

TEST_CASE("subband sizes halve per level") {
    RasterF32 x = random_plane(64, 32, 3);
    WaveletPyramid p = dwt2(x, 3);
    REQUIRE(p.levels.size() == 3);
    CHECK(p.levels[0].lh.width == 32);
    CHECK(p.levels[0].lh.height == 16);
    CHECK(p.levels[2].hh.width == 8);
    CHECK(p.levels[2].hh.height == 4);
    CHECK(p.ll.width == 8);
    CHECK(p.ll.height == 4);
}

TEST_CASE("plane too small for requested depth throws") {
    RasterF32 x = random_plane(8, 64, 4);
    CHECK_THROWS_WITH_AS(dwt2(x, 4), doctest::Contains("too small"), DataError);
    CHECK_NOTHROW(dwt2(x, 3));
}
