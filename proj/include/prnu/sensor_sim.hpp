#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prnu/image.hpp"

namespace prnu {

/// Synthetic sensor with a known ground-truth PRNU factor.
struct SyntheticCamera {
    RasterF32 prnu;            // true K, i.i.d. zero-mean Gaussian
    double read_noise_sd = 2.0;
    double shot_noise_gain = 0.0;
    std::uint64_t seed = 0;
    std::string camera_id;
};

SyntheticCamera make_camera(std::string camera_id, int width, int height, double sigma_k,
                            double read_noise_sd, double shot_noise_gain, std::uint64_t seed);

struct SceneSpec {
    enum class Kind { FlatField, Gradient, Textured };
    Kind kind = Kind::Textured;
    int width = 0;
    int height = 0;
    double flat_level = 128.0; // FlatField only
    int octaves = 3;           // Textured only
    std::uint64_t seed = 0;
};

SceneSpec flat_scene(int width, int height, double level, std::uint64_t seed);
SceneSpec gradient_scene(int width, int height, std::uint64_t seed);
SceneSpec textured_scene(int width, int height, int octaves, std::uint64_t seed);

/// Noise-free scene radiance in [0, 255].
RasterF32 render_scene(const SceneSpec& scene);

/// I = round_truncate(I0 * (1 + K) + read noise + shot noise), deterministic
/// per (camera.seed, scene.seed).
ImagePlane capture(const SyntheticCamera& camera, const SceneSpec& scene);

struct BenchConfig {
    int width = 128;
    int height = 128;
    int alice_pool = 160;      // natural candidate pool
    int alice_flatfield = 40;  // fingerprint estimation set
    int negatives = 200;       // calibration images from other cameras
    int eve_targets = 30;
    int negative_cameras = 4;
    double sigma_k = 0.02;
    double read_noise_sd = 2.0;
    double shot_noise_gain = 0.0;
    std::uint64_t seed = 1;
};

struct ManifestEntry {
    std::string camera_id;
    std::string role; // alice_pool | alice_flatfield | negative | eve_target
    std::string path;
    std::uint64_t seed = 0;
};

struct CameraRecord {
    std::string camera_id;
    std::uint64_t seed = 0;
    double sigma_k = 0.0;
    double read_noise_sd = 0.0;
    double shot_noise_gain = 0.0;
    std::string truth_path; // PRNU raster with the true K; oracle use only
};

struct DatasetManifest {
    int width = 0;
    int height = 0;
    std::uint64_t seed = 0;
    std::vector<CameraRecord> cameras;
    std::vector<ManifestEntry> files;

    /// Directory file paths are relative to; set by make_bench/load_manifest,
    /// not serialized.
    std::string base_dir;

    std::vector<const ManifestEntry*> with_role(const std::string& role) const;
    std::string resolve(const std::string& relative_path) const;
};

/// Generates the synthetic dataset on disk (PGM images plus per-camera truth
/// rasters) and returns the manifest, which is also written as manifest.json.
DatasetManifest make_bench(const BenchConfig& config, const std::string& out_dir);

void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

/// Loads every image of a role, in manifest order. Role "truth" is refused;
/// truth rasters are reachable only through CameraRecord::truth_path.
std::vector<ImagePlane> load_role_images(const DatasetManifest& manifest, const std::string& role);

} // namespace prnu
