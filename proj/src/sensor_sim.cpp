#include "prnu/sensor_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "prnu/error.hpp"
#include "prnu/image_io.hpp"
#include "prnu/parallel.hpp"
#include "prnu/rng.hpp"

namespace prnu {

namespace {

// Seed-domain tags so unrelated draws never share a stream.
constexpr std::uint64_t kTagPrnu = 0x01;
constexpr std::uint64_t kTagCapture = 0x02;
constexpr std::uint64_t kTagSceneGradient = 0x03;
constexpr std::uint64_t kTagSceneTexture = 0x04;

double smoothstep(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(ix), static_cast<std::uint64_t>(iy)));
    return 2.0 * rng.next_unit() - 1.0;
}

// Value noise on a hashed lattice with a random rotation, offset, and
// frequency jitter per octave. Each scene gets its own lattice geometry, so
// no two scenes share interpolation structure at fixed pixel positions.
void add_value_noise(RasterF32& img, int octave, double amplitude, std::uint64_t seed) {
    std::uint64_t octave_seed = derive_seed(seed, kTagSceneTexture, static_cast<std::uint64_t>(octave));
    Rng rng(octave_seed);
    double angle = 2.0 * 3.141592653589793 * rng.next_unit();
    double ca = std::cos(angle);
    double sa = std::sin(angle);
    double cells = static_cast<double>(4 << octave) * (0.8 + 0.4 * rng.next_unit());
    double scale = cells / std::max(1, std::min(img.width, img.height));
    double ox = 1024.0 * rng.next_unit();
    double oy = 1024.0 * rng.next_unit();
    std::uint64_t lattice_seed = rng.next_u64();

    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double u = (ca * x - sa * y) * scale + ox;
            double v = (sa * x + ca * y) * scale + oy;
            auto iu = static_cast<std::int64_t>(std::floor(u));
            auto iv = static_cast<std::int64_t>(std::floor(v));
            double tu = smoothstep(u - static_cast<double>(iu));
            double tv = smoothstep(v - static_cast<double>(iv));
            double v00 = lattice_value(lattice_seed, iu, iv);
            double v10 = lattice_value(lattice_seed, iu + 1, iv);
            double v01 = lattice_value(lattice_seed, iu, iv + 1);
            double v11 = lattice_value(lattice_seed, iu + 1, iv + 1);
            double val = (v00 * (1 - tu) + v10 * tu) * (1 - tv) + (v01 * (1 - tu) + v11 * tu) * tv;
            img.at(x, y) += static_cast<float>(amplitude * val);
        }
    }
}

void add_gradient(RasterF32& img, double base, double amplitude, std::uint64_t seed) {
    Rng rng(derive_seed(seed, kTagSceneGradient));
    double angle = 2.0 * 3.141592653589793 * rng.next_unit();
    double cx = std::cos(angle);
    double cy = std::sin(angle);
    for (int y = 0; y < img.height; ++y) {
        double fy = (img.height > 1) ? static_cast<double>(y) / (img.height - 1) : 0.0;
        for (int x = 0; x < img.width; ++x) {
            double fx = (img.width > 1) ? static_cast<double>(x) / (img.width - 1) : 0.0;
            double t = 0.5 * (cx * (2.0 * fx - 1.0) + cy * (2.0 * fy - 1.0)); // [-0.5, 0.5]
            img.at(x, y) += static_cast<float>(base + amplitude * t);
        }
    }
}

} // namespace

SyntheticCamera make_camera(std::string camera_id, int width, int height, double sigma_k,
                            double read_noise_sd, double shot_noise_gain, std::uint64_t seed) {
    if (!(sigma_k > 0.0 && sigma_k <= 0.1)) {
        throw ConfigError("make_camera: sigma_k outside (0, 0.1]");
    }
    if (read_noise_sd < 0.0 || shot_noise_gain < 0.0) {
        throw ConfigError("make_camera: negative noise parameter");
    }
    SyntheticCamera cam;
    cam.camera_id = std::move(camera_id);
    cam.read_noise_sd = read_noise_sd;
    cam.shot_noise_gain = shot_noise_gain;
    cam.seed = seed;
    cam.prnu = make_raster(width, height);
    Rng rng(derive_seed(seed, kTagPrnu));
    for (auto& v : cam.prnu.samples) {
        v = static_cast<float>(sigma_k * rng.next_gaussian());
    }
    return cam;
}

SceneSpec flat_scene(int width, int height, double level, std::uint64_t seed) {
    SceneSpec s;
    s.kind = SceneSpec::Kind::FlatField;
    s.width = width;
    s.height = height;
    s.flat_level = level;
    s.seed = seed;
    return s;
}

SceneSpec gradient_scene(int width, int height, std::uint64_t seed) {
    SceneSpec s;
    s.kind = SceneSpec::Kind::Gradient;
    s.width = width;
    s.height = height;
    s.seed = seed;
    return s;
}

SceneSpec textured_scene(int width, int height, int octaves, std::uint64_t seed) {
    SceneSpec s;
    s.kind = SceneSpec::Kind::Textured;
    s.width = width;
    s.height = height;
    s.octaves = octaves;
    s.seed = seed;
    return s;
}

RasterF32 render_scene(const SceneSpec& scene) {
    RasterF32 img = make_raster(scene.width, scene.height, 0.0f);
    switch (scene.kind) {
        case SceneSpec::Kind::FlatField:
            if (scene.flat_level < 0.0 || scene.flat_level > 255.0) {
                throw ConfigError("flat-field level outside [0, 255]");
            }
            std::fill(img.samples.begin(), img.samples.end(),
                      static_cast<float>(scene.flat_level));
            break;
        case SceneSpec::Kind::Gradient:
            add_gradient(img, 128.0, 90.0, scene.seed);
            break;
        case SceneSpec::Kind::Textured: {
            if (scene.octaves < 1) throw ConfigError("textured scene needs octaves >= 1");
            add_gradient(img, 126.0, 64.0, scene.seed);
            double amplitude = 34.0;
            for (int o = 0; o < scene.octaves; ++o) {
                add_value_noise(img, o, amplitude, scene.seed);
                amplitude *= 0.55;
            }
            break;
        }
    }
    for (auto& v : img.samples) v = std::clamp(v, 0.0f, 255.0f);
    return img;
}

ImagePlane capture(const SyntheticCamera& camera, const SceneSpec& scene) {
    if (scene.width != camera.prnu.width || scene.height != camera.prnu.height) {
        throw DataError("capture: scene/camera dimension mismatch");
    }
    RasterF32 radiance = render_scene(scene);
    Rng rng(derive_seed(camera.seed, scene.seed, kTagCapture));
    RasterF32 sensed = make_raster(scene.width, scene.height);
    for (std::size_t i = 0; i < sensed.samples.size(); ++i) {
        double i0 = radiance.samples[i];
        double v = i0 * (1.0 + static_cast<double>(camera.prnu.samples[i]));
        if (camera.read_noise_sd > 0.0) v += camera.read_noise_sd * rng.next_gaussian();
        if (camera.shot_noise_gain > 0.0) {
            v += camera.shot_noise_gain * std::sqrt(std::max(0.0, i0)) * rng.next_gaussian();
        }
        sensed.samples[i] = static_cast<float>(v);
    }
    return round_truncate(sensed);
}

std::vector<const ManifestEntry*> DatasetManifest::with_role(const std::string& role) const {
    std::vector<const ManifestEntry*> out;
    for (const auto& entry : files) {
        if (entry.role == role) out.push_back(&entry);
    }
    return out;
}

std::string DatasetManifest::resolve(const std::string& relative_path) const {
    if (base_dir.empty()) return relative_path;
    return (std::filesystem::path(base_dir) / relative_path).string();
}

namespace {

std::string numbered(const std::string& stem, int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "_%04d.pgm", i);
    return stem + buf;
}

} // namespace

DatasetManifest make_bench(const BenchConfig& config, const std::string& out_dir) {
    if (config.alice_pool < 0 || config.alice_flatfield < 1 || config.negatives < 0 ||
        config.eve_targets < 0 || config.negative_cameras < 1) {
        throw ConfigError("make_bench: invalid image counts");
    }
    std::filesystem::create_directories(out_dir);

    DatasetManifest manifest;
    manifest.width = config.width;
    manifest.height = config.height;
    manifest.seed = config.seed;
    manifest.base_dir = out_dir;

    auto add_camera = [&](const std::string& id, std::uint64_t camera_seed) {
        SyntheticCamera cam =
            make_camera(id, config.width, config.height, config.sigma_k, config.read_noise_sd,
                        config.shot_noise_gain, camera_seed);
        CameraRecord rec;
        rec.camera_id = id;
        rec.seed = camera_seed;
        rec.sigma_k = config.sigma_k;
        rec.read_noise_sd = config.read_noise_sd;
        rec.shot_noise_gain = config.shot_noise_gain;
        rec.truth_path = "truth_" + id + ".prnu";
        save_raster(cam.prnu, manifest.resolve(rec.truth_path));
        manifest.cameras.push_back(rec);
        return cam;
    };

    SyntheticCamera alice = add_camera("alice", derive_seed(config.seed, 1));
    SyntheticCamera eve = add_camera("eve1", derive_seed(config.seed, 2));
    std::vector<SyntheticCamera> negative_cams;
    for (int i = 0; i < config.negative_cameras; ++i) {
        negative_cams.push_back(add_camera("neg" + std::to_string(i + 1),
                                           derive_seed(config.seed, 16 + static_cast<std::uint64_t>(i))));
    }

    struct Job {
        const SyntheticCamera* camera;
        SceneSpec scene;
        ManifestEntry entry;
    };
    std::vector<Job> jobs;

    for (int i = 0; i < config.alice_pool; ++i) {
        Job job;
        job.camera = &alice;
        job.scene = textured_scene(config.width, config.height, 3,
                                   derive_seed(config.seed, 100, static_cast<std::uint64_t>(i)));
        job.entry = {"alice", "alice_pool", numbered("alice_pool", i), job.scene.seed};
        jobs.push_back(job);
    }
    for (int i = 0; i < config.alice_flatfield; ++i) {
        std::uint64_t scene_seed = derive_seed(config.seed, 101, static_cast<std::uint64_t>(i));
        Rng level_rng(scene_seed);
        double level = 118.0 + static_cast<double>(level_rng.next_below(21));
        Job job;
        job.camera = &alice;
        job.scene = flat_scene(config.width, config.height, level, scene_seed);
        job.entry = {"alice", "alice_flatfield", numbered("alice_flat", i), scene_seed};
        jobs.push_back(job);
    }
    for (int i = 0; i < config.negatives; ++i) {
        const SyntheticCamera& cam = negative_cams[static_cast<std::size_t>(i) % negative_cams.size()];
        Job job;
        job.camera = &cam;
        job.scene = textured_scene(config.width, config.height, 3,
                                   derive_seed(config.seed, 102, static_cast<std::uint64_t>(i)));
        job.entry = {cam.camera_id, "negative", numbered("negative", i), job.scene.seed};
        jobs.push_back(job);
    }
    for (int i = 0; i < config.eve_targets; ++i) {
        Job job;
        job.camera = &eve;
        job.scene = textured_scene(config.width, config.height, 3,
                                   derive_seed(config.seed, 103, static_cast<std::uint64_t>(i)));
        job.entry = {"eve1", "eve_target", numbered("eve_target", i), job.scene.seed};
        jobs.push_back(job);
    }

    parallel_for(static_cast<int>(jobs.size()), [&](int i) {
        const Job& job = jobs[static_cast<std::size_t>(i)];
        ImagePlane img = capture(*job.camera, job.scene);
        save_pgm(img, manifest.resolve(job.entry.path));
    });

    for (const auto& job : jobs) manifest.files.push_back(job.entry);

    save_manifest(manifest, manifest.resolve("manifest.json"));
    return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["width"] = manifest.width;
    j["height"] = manifest.height;
    j["seed"] = manifest.seed;
    nlohmann::json cams = nlohmann::json::array();
    for (const auto& cam : manifest.cameras) {
        cams.push_back({{"camera_id", cam.camera_id},
                        {"seed", cam.seed},
                        {"sigma_k", cam.sigma_k},
                        {"read_noise_sd", cam.read_noise_sd},
                        {"shot_noise_gain", cam.shot_noise_gain},
                        {"truth_path", cam.truth_path}});
    }
    j["cameras"] = std::move(cams);
    nlohmann::json files = nlohmann::json::array();
    for (const auto& entry : manifest.files) {
        files.push_back({{"camera_id", entry.camera_id},
                         {"role", entry.role},
                         {"path", entry.path},
                         {"seed", entry.seed}});
    }
    j["files"] = std::move(files);
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("unreadable file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad manifest JSON: " + std::string(e.what()));
    }
    DatasetManifest manifest;
    try {
        manifest.width = j.at("width").get<int>();
        manifest.height = j.at("height").get<int>();
        manifest.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& cam : j.at("cameras")) {
            CameraRecord rec;
            rec.camera_id = cam.at("camera_id").get<std::string>();
            rec.seed = cam.at("seed").get<std::uint64_t>();
            rec.sigma_k = cam.at("sigma_k").get<double>();
            rec.read_noise_sd = cam.at("read_noise_sd").get<double>();
            rec.shot_noise_gain = cam.at("shot_noise_gain").get<double>();
            rec.truth_path = cam.at("truth_path").get<std::string>();
            manifest.cameras.push_back(rec);
        }
        for (const auto& entry : j.at("files")) {
            ManifestEntry e;
            e.camera_id = entry.at("camera_id").get<std::string>();
            e.role = entry.at("role").get<std::string>();
            e.path = entry.at("path").get<std::string>();
            e.seed = entry.at("seed").get<std::uint64_t>();
            manifest.files.push_back(e);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad manifest JSON: " + std::string(e.what()));
    }
    manifest.base_dir = std::filesystem::path(path).parent_path().string();
    return manifest;
}

std::vector<ImagePlane> load_role_images(const DatasetManifest& manifest, const std::string& role) {
    if (role == "truth") {
        throw ConfigError("role 'truth' holds ground-truth fingerprints, not loadable images");
    }
    auto entries = manifest.with_role(role);
    if (entries.empty()) throw DataError("manifest has no files with role: " + role);
    std::vector<ImagePlane> images(entries.size());
    parallel_for(static_cast<int>(entries.size()), [&](int i) {
        images[static_cast<std::size_t>(i)] =
            load_image(manifest.resolve(entries[static_cast<std::size_t>(i)]->path));
    });
    return images;
}

} // namespace prnu
