#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "prnu/denoise.hpp"
#include "prnu/error.hpp"
#include "prnu/fingerprint.hpp"
#include "prnu/image_io.hpp"
#include "prnu/rng.hpp"
#include "prnu/sensor_sim.hpp"
#include "prnu/stats.hpp"

using namespace prnu;

TEST_CASE("noise-free flat capture has the closed form") {
    SyntheticCamera cam;
    cam.prnu = make_raster(16, 16, 0.02f);
    cam.read_noise_sd = 0.0;
    cam.shot_noise_gain = 0.0;
    cam.seed = 1;
    ImagePlane img = capture(cam, flat_scene(16, 16, 100.0, 2));
    for (float v : img.samples) CHECK(v == 102.0f);
}

TEST_CASE("capture is deterministic per seed pair") {
    SyntheticCamera cam = make_camera("a", 32, 32, 0.02, 2.0, 0.5, 10);
    SceneSpec scene = textured_scene(32, 32, 3, 20);
    ImagePlane a = capture(cam, scene);
    ImagePlane b = capture(cam, scene);
    CHECK(a.samples == b.samples);

    SceneSpec other = textured_scene(32, 32, 3, 21);
    ImagePlane c = capture(cam, other);
    CHECK(a.samples != c.samples);
}

TEST_CASE("capture output is quantized into [0, 255]") {
    SyntheticCamera cam = make_camera("a", 32, 32, 0.05, 20.0, 1.0, 11);
    ImagePlane img = capture(cam, gradient_scene(32, 32, 12));
    for (float v : img.samples) {
        CHECK(v >= 0.0f);
        CHECK(v <= 255.0f);
        CHECK(v == std::floor(v));
    }
}

TEST_CASE("flat-field estimation recovers the true fingerprint") {
    int w = 128;
    int h = 128;
    SyntheticCamera cam = make_camera("a", w, h, 0.02, 2.0, 0.0, 77);
    std::vector<ImagePlane> flats;
    for (int i = 0; i < 40; ++i) {
        flats.push_back(capture(cam, flat_scene(w, h, 128.0, derive_seed(88, static_cast<std::uint64_t>(i)))));
    }
    DenoiseParams p;
    Fingerprint fp = estimate_fingerprint(flats, p);
    CHECK(correlation(fp.raster, cam.prnu) > 0.5);
}

TEST_CASE("fingerprint recovery improves with N") {
    int w = 64;
    int h = 64;
    DenoiseParams p;
    std::vector<int> ns = {5, 20, 80};
    std::vector<double> mean_corr(ns.size(), 0.0);
    int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        SyntheticCamera cam = make_camera("a", w, h, 0.02, 2.0, 0.0,
                                          derive_seed(500, static_cast<std::uint64_t>(s)));
        std::vector<ImagePlane> flats;
        std::vector<RasterF32> residuals;
        for (int i = 0; i < ns.back(); ++i) {
            flats.push_back(capture(cam, flat_scene(w, h, 128.0,
                                                    derive_seed(501, static_cast<std::uint64_t>(s),
                                                                static_cast<std::uint64_t>(i)))));
            residuals.push_back(residual(flats.back(), p));
        }
        for (std::size_t ni = 0; ni < ns.size(); ++ni) {
            std::span<const ImagePlane> imgs(flats.data(), static_cast<std::size_t>(ns[ni]));
            std::span<const RasterF32> res(residuals.data(), static_cast<std::size_t>(ns[ni]));
            Fingerprint fp = estimate_fingerprint_from_residuals(imgs, res);
            mean_corr[ni] += correlation(fp.raster, cam.prnu) / seeds;
        }
    }
    CHECK(mean_corr[0] <= mean_corr[1]);
    CHECK(mean_corr[1] <= mean_corr[2]);
}

TEST_CASE("cross-camera detection separates cleanly at desk scale") {
    int w = 64;
    int h = 64;
    DenoiseParams p;
    SyntheticCamera alice = make_camera("a", w, h, 0.02, 2.0, 0.0, 600);
    SyntheticCamera other = make_camera("b", w, h, 0.02, 2.0, 0.0, 601);
    std::vector<ImagePlane> flats;
    for (int i = 0; i < 30; ++i) {
        flats.push_back(capture(alice, flat_scene(w, h, 128.0, derive_seed(602, static_cast<std::uint64_t>(i)))));
    }
    Fingerprint fp = estimate_fingerprint(flats, p);

    std::vector<double> matched;
    std::vector<double> unmatched;
    for (int i = 0; i < 30; ++i) {
        std::uint64_t s = derive_seed(603, static_cast<std::uint64_t>(i));
        matched.push_back(detect(capture(alice, textured_scene(w, h, 3, s)), fp, p));
        unmatched.push_back(detect(capture(other, textured_scene(w, h, 3, s + 9000)), fp, p));
    }
    CHECK(roc_auc(matched, unmatched) >= 0.99);
}

TEST_CASE("make_bench writes the manifest with disjoint roles and matching counts") {
    auto dir = std::filesystem::temp_directory_path() / "prnu_test_bench_ds";
    std::filesystem::remove_all(dir);
    BenchConfig cfg;
    cfg.width = 32;
    cfg.height = 32;
    cfg.alice_pool = 12;
    cfg.alice_flatfield = 5;
    cfg.negatives = 8;
    cfg.eve_targets = 3;
    cfg.seed = 99;
    DatasetManifest manifest = make_bench(cfg, dir.string());

    CHECK(manifest.files.size() == 12 + 5 + 8 + 3);
    CHECK(manifest.cameras.size() == 2 + 4);

    std::set<std::string> paths;
    for (const auto& entry : manifest.files) {
        CHECK(paths.insert(entry.path).second); // no duplicates across roles
        CHECK(std::filesystem::exists(manifest.resolve(entry.path)));
    }
    CHECK(manifest.with_role("alice_pool").size() == 12);
    CHECK(manifest.with_role("alice_flatfield").size() == 5);
    CHECK(manifest.with_role("negative").size() == 8);
    CHECK(manifest.with_role("eve_target").size() == 3);

    DatasetManifest loaded = load_manifest((dir / "manifest.json").string());
    CHECK(loaded.files.size() == manifest.files.size());
    CHECK(loaded.cameras.size() == manifest.cameras.size());
    CHECK(loaded.width == 32);

    std::vector<ImagePlane> pool = load_role_images(loaded, "alice_pool");
    CHECK(pool.size() == 12);
    CHECK(pool[0].width == 32);

    CHECK_THROWS_AS(load_role_images(loaded, "truth"), ConfigError);
    CHECK_THROWS_AS(load_role_images(loaded, "no_such_role"), DataError);
}

TEST_CASE("distinct cameras share no fingerprint") {
    auto dir = std::filesystem::temp_directory_path() / "prnu_test_bench_k";
    std::filesystem::remove_all(dir);
    BenchConfig cfg;
    cfg.width = 128;
    cfg.height = 128;
    cfg.alice_pool = 1;
    cfg.alice_flatfield = 1;
    cfg.negatives = 1;
    cfg.eve_targets = 1;
    cfg.seed = 5;
    DatasetManifest manifest = make_bench(cfg, dir.string());

    RasterF32 k_alice;
    RasterF32 k_eve;
    for (const auto& cam : manifest.cameras) {
        if (cam.camera_id == "alice") k_alice = load_raster(manifest.resolve(cam.truth_path));
        if (cam.camera_id == "eve1") k_eve = load_raster(manifest.resolve(cam.truth_path));
    }
    REQUIRE(k_alice.width == 128);
    REQUIRE(k_eve.width == 128);
    CHECK(std::abs(correlation(k_alice, k_eve)) < 0.05);
}

TEST_CASE("camera parameter validation") {
    CHECK_THROWS_AS(make_camera("x", 8, 8, 0.0, 1.0, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(make_camera("x", 8, 8, 0.2, 1.0, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(make_camera("x", 8, 8, 0.02, -1.0, 0.0, 1), ConfigError);
    SyntheticCamera cam = make_camera("x", 8, 8, 0.02, 1.0, 0.0, 1);
    CHECK_THROWS_AS(capture(cam, flat_scene(9, 8, 100.0, 1)), DataError);
}
