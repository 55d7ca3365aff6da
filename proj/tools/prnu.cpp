#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prnu/bench.hpp"
#include "prnu/error.hpp"
#include "prnu/image_io.hpp"
#include "prnu/parallel.hpp"
#include "prnu/rng.hpp"
#include "prnu/stats.hpp"

namespace {

using namespace prnu;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct SimulateOptions {
    std::string out_dir;
    BenchConfig config;
};

struct FingerprintOptions {
    std::string manifest_path;
    std::string role = "alice_flatfield";
    std::string out_path;
    double sigma = 5.0;
};

struct IdentifyOptions {
    std::string manifest_path;
    std::string fingerprint_path;
    std::string role = "eve_target";
    double pfa = 1e-2;
    double sigma = 5.0;
    std::string out_csv;
    std::string out_model;
};

struct AttackOptions {
    std::string manifest_path;
    int target_index = 0;
    std::string target_path;
    std::string method = "block";
    int stolen_count = 60;
    int subset_size = 10;
    int block_side = 32;
    double target_psnr = 50.0;
    std::uint64_t seed = 1;
    double predenoise_sigma = 1.0;
    double sigma = 5.0;
    std::string out_path;
    std::string sidecar_path;
};

struct TriangleOptions {
    std::string manifest_path;
    std::string fingerprint_path;
    std::vector<std::string> forgery_paths;
    int stolen_count = 0;
    int fit_count = 100;
    double pfa = 1e-3;
    double sigma = 5.0;
    int k = 20;
    int repetitions = 10000;
    int candidate_count = 0; // pooled: N_c; 0 means stolen_count
    std::uint64_t seed = 1;
    std::string out_csv;
    std::string out_json;
};

struct BenchOptions {
    std::string out_dir;
    std::uint64_t seed = 0; // 0 keeps per-experiment defaults
    bool skip_l_sweep = false;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + path);
    return f;
}

int run_simulate(const SimulateOptions& opt) {
    DatasetManifest manifest = make_bench(opt.config, opt.out_dir);
    std::cout << "dataset written to " << opt.out_dir << " (" << manifest.files.size()
              << " files, " << manifest.cameras.size() << " cameras)\n";
    return kExitOk;
}

int run_fingerprint(const FingerprintOptions& opt) {
    DatasetManifest manifest = load_manifest(opt.manifest_path);
    std::vector<ImagePlane> images = load_role_images(manifest, opt.role);
    Fingerprint fp = estimate_fingerprint(images, extraction_params(opt.sigma));
    save_fingerprint(fp, opt.out_path);
    std::cout << "fingerprint from " << images.size() << " images (role " << opt.role
              << ") written to " << opt.out_path << "\n";
    return kExitOk;
}

int run_identify(const IdentifyOptions& opt) {
    DatasetManifest manifest = load_manifest(opt.manifest_path);
    Fingerprint fp;
    fp.raster = load_raster(opt.fingerprint_path);
    fp.source_count = 1;
    DenoiseParams extract = extraction_params(opt.sigma);

    std::vector<ImagePlane> negatives = load_role_images(manifest, "negative");
    std::vector<double> negative_scores(negatives.size());
    parallel_for(static_cast<int>(negatives.size()), [&](int i) {
        negative_scores[static_cast<std::size_t>(i)] =
            detect(negatives[static_cast<std::size_t>(i)], fp, extract);
    });
    DetectorModel model = calibrate_threshold(negative_scores, opt.pfa);

    auto entries = manifest.with_role(opt.role);
    std::vector<ImagePlane> images = load_role_images(manifest, opt.role);
    std::vector<double> scores(images.size());
    parallel_for(static_cast<int>(images.size()), [&](int i) {
        scores[static_cast<std::size_t>(i)] = detect(images[static_cast<std::size_t>(i)], fp, extract);
    });

    if (!opt.out_model.empty()) save_detector_model(model, opt.out_model);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!opt.out_csv.empty()) {
        file = open_out(opt.out_csv);
        out = &file;
    }
    *out << "path,role,pfa,threshold,score,decision\n";
    int passes = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        bool pass = scores[i] > model.threshold;
        passes += pass ? 1 : 0;
        *out << entries[i]->path << ',' << opt.role << ',' << fmt(opt.pfa) << ','
             << fmt(model.threshold) << ',' << fmt(scores[i]) << ',' << (pass ? 1 : 0) << '\n';
    }
    std::cout << passes << "/" << images.size() << " images above threshold "
              << fmt(model.threshold) << "\n";
    return kExitOk;
}

int run_attack(const AttackOptions& opt) {
    DatasetManifest manifest = load_manifest(opt.manifest_path);
    std::vector<ImagePlane> pool = load_role_images(manifest, "alice_pool");
    if (opt.stolen_count < 1 || opt.stolen_count > static_cast<int>(pool.size())) {
        throw ConfigError("attack: --n outside the alice_pool size (key: n)");
    }
    std::span<const ImagePlane> stolen(pool.data(), static_cast<std::size_t>(opt.stolen_count));

    ImagePlane target;
    if (!opt.target_path.empty()) {
        target = load_image(opt.target_path);
    } else {
        auto targets = manifest.with_role("eve_target");
        if (opt.target_index < 0 || opt.target_index >= static_cast<int>(targets.size())) {
            throw ConfigError("attack: --target-index outside eve_target role (key: target-index)");
        }
        target = load_image(manifest.resolve(targets[static_cast<std::size_t>(opt.target_index)]->path));
    }

    DenoiseParams extract = extraction_params(opt.sigma);
    ForgeryRecord record;
    if (opt.method == "conventional") {
        record = conventional_attack(target, stolen, opt.target_psnr, extract, opt.predenoise_sigma);
    } else if (opt.method == "block") {
        AttackParams params;
        params.block_side = opt.block_side;
        params.subset_size = opt.subset_size;
        params.target_psnr = opt.target_psnr;
        params.seed = opt.seed;
        params.predenoise_sigma = opt.predenoise_sigma;
        for (const auto& w : attack_param_warnings(params)) std::cerr << "warning: " << w << "\n";
        record = block_attack(target, stolen, params, extract);
    } else {
        throw ConfigError("attack: unknown method '" + opt.method + "' (key: method)");
    }

    save_pgm(record.forged, opt.out_path);
    std::string sidecar = opt.sidecar_path.empty() ? opt.out_path + ".json" : opt.sidecar_path;
    save_forgery_sidecar(record, sidecar);
    std::cout << "forgery written to " << opt.out_path << " (overall PSNR "
              << fmt(record.overall_psnr) << " dB, sidecar " << sidecar << ")\n";
    return kExitOk;
}

struct TriangleData {
    Fingerprint k_alice;
    DenoiseParams extract;
    std::vector<ImagePlane> pool;
    std::vector<RasterF32> pool_res;
    std::vector<double> pool_c_ik;
    int stolen_count = 0;
    int fit_begin = 0;
    int fit_count = 0;
};

TriangleData load_triangle_data(const TriangleOptions& opt) {
    TriangleData data;
    DatasetManifest manifest = load_manifest(opt.manifest_path);
    data.extract = extraction_params(opt.sigma);
    data.k_alice.raster = load_raster(opt.fingerprint_path);
    data.k_alice.source_count = 1;
    data.pool = load_role_images(manifest, "alice_pool");

    int need = opt.stolen_count + opt.fit_count;
    if (opt.stolen_count < 1) throw ConfigError("triangle: --stolen-count must be >= 1");
    if (need > static_cast<int>(data.pool.size())) {
        throw ConfigError("triangle: stolen-count + fit-count exceeds alice_pool size");
    }
    data.stolen_count = opt.stolen_count;
    data.fit_begin = opt.stolen_count;
    data.fit_count = opt.fit_count;

    data.pool_res.resize(data.pool.size());
    parallel_for(static_cast<int>(data.pool.size()), [&](int i) {
        data.pool_res[static_cast<std::size_t>(i)] =
            residual(data.pool[static_cast<std::size_t>(i)], data.extract);
    });
    data.pool_c_ik.resize(data.pool.size());
    parallel_for(static_cast<int>(data.pool.size()), [&](int i) {
        auto idx = static_cast<std::size_t>(i);
        data.pool_c_ik[idx] = detect_with_residual(data.pool[idx], data.pool_res[idx], data.k_alice);
    });
    return data;
}

struct ForgeryStats {
    double c_jk = 0.0;
    std::vector<double> c_true;   // per pool image
    std::vector<double> statistic; // per pool image
    TriangleModel model;
};

ForgeryStats stats_for_forgery(const TriangleData& data, const ImagePlane& forged) {
    ForgeryStats fs;
    RasterF32 res = residual(forged, data.extract);
    fs.c_jk = detect_with_residual(forged, res, data.k_alice);
    fs.c_true.resize(data.pool.size());
    parallel_for(static_cast<int>(data.pool.size()), [&](int i) {
        auto idx = static_cast<std::size_t>(i);
        fs.c_true[idx] = correlation(data.pool_res[idx], res);
    });

    std::vector<double> fit_est(static_cast<std::size_t>(data.fit_count));
    std::vector<double> fit_true(static_cast<std::size_t>(data.fit_count));
    for (int i = 0; i < data.fit_count; ++i) {
        auto idx = static_cast<std::size_t>(data.fit_begin + i);
        fit_est[static_cast<std::size_t>(i)] = estimate_c(data.pool_c_ik[idx], fs.c_jk);
        fit_true[static_cast<std::size_t>(i)] = fs.c_true[idx];
    }
    fs.model = fit_triangle_model(fit_est, fit_true);

    fs.statistic.resize(data.pool.size());
    for (std::size_t i = 0; i < data.pool.size(); ++i) {
        fs.statistic[i] = triangle_statistic(fs.c_true[i], estimate_c(data.pool_c_ik[i], fs.c_jk),
                                             fs.model.line);
    }
    return fs;
}

int run_triangle_individual(const TriangleOptions& opt) {
    if (opt.forgery_paths.size() != 1) {
        throw ConfigError("triangle individual: exactly one --forgery required");
    }
    TriangleData data = load_triangle_data(opt);
    ImagePlane forged = load_image(opt.forgery_paths[0]);
    ForgeryStats fs = stats_for_forgery(data, forged);

    std::vector<TriangleRecord> records(static_cast<std::size_t>(data.stolen_count));
    for (int i = 0; i < data.stolen_count; ++i) {
        auto idx = static_cast<std::size_t>(i);
        records[idx].candidate_id = i;
        records[idx].c_true = fs.c_true[idx];
        records[idx].c_est = estimate_c(data.pool_c_ik[idx], fs.c_jk);
        records[idx].statistic = fs.statistic[idx];
    }
    IndividualTestResult test = individual_test(records, fs.model.pdf, opt.pfa);

    if (!opt.out_csv.empty()) {
        auto f = open_out(opt.out_csv);
        f << "candidate_id,c_true,c_est,statistic,flag,pfa,t2\n";
        for (const auto& rec : records) {
            bool flag = rec.statistic > test.t2;
            f << rec.candidate_id << ',' << fmt(rec.c_true) << ',' << fmt(rec.c_est) << ','
              << fmt(rec.statistic) << ',' << (flag ? 1 : 0) << ',' << fmt(opt.pfa) << ','
              << fmt(test.t2) << '\n';
        }
    }
    if (!opt.out_json.empty()) {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["lambda"] = fs.model.line.lambda;
        j["eta"] = fs.model.line.eta;
        j["model"] = {{"mean", fs.model.pdf.mean}, {"sd", fs.model.pdf.sd}};
        j["t2"] = test.t2;
        j["pfa"] = opt.pfa;
        j["flagged"] = test.flag_count;
        j["candidates"] = records.size();
        j["p_d"] = static_cast<double>(test.flag_count) / static_cast<double>(records.size());
        j["max_statistic"] = test.max_statistic;
        open_out(opt.out_json) << j.dump(2) << "\n";
    }
    std::cout << "individual test: " << test.flag_count << "/" << records.size()
              << " candidates flagged (t2 " << fmt(test.t2) << ", max statistic "
              << fmt(test.max_statistic) << ")\n";
    return kExitOk;
}

int run_triangle_pooled(const TriangleOptions& opt) {
    if (opt.forgery_paths.size() != 1) {
        throw ConfigError("triangle pooled: exactly one --forgery required");
    }
    TriangleData data = load_triangle_data(opt);
    int n_c = opt.candidate_count > 0 ? opt.candidate_count : data.stolen_count;
    if (n_c < data.stolen_count) throw ConfigError("triangle pooled: --candidates below stolen-count");
    if (data.fit_begin + data.fit_count + (n_c - data.stolen_count) >
        static_cast<int>(data.pool.size())) {
        throw ConfigError("triangle pooled: pool too small for requested candidate count");
    }
    if (opt.k > n_c) throw ConfigError("triangle pooled: k exceeds candidate count");

    ImagePlane forged = load_image(opt.forgery_paths[0]);
    ForgeryStats fs = stats_for_forgery(data, forged);

    // Candidate statistics: stolen images first, then unused images beyond the fit set.
    std::vector<double> candidate_stats(static_cast<std::size_t>(n_c));
    for (int i = 0; i < data.stolen_count; ++i) {
        candidate_stats[static_cast<std::size_t>(i)] = fs.statistic[static_cast<std::size_t>(i)];
    }
    int unused_begin = data.fit_begin + data.fit_count;
    for (int i = data.stolen_count; i < n_c; ++i) {
        candidate_stats[static_cast<std::size_t>(i)] =
            fs.statistic[static_cast<std::size_t>(unused_begin + (i - data.stolen_count))];
    }

    Rng rng(opt.seed);
    std::vector<double> sample(static_cast<std::size_t>(opt.k));
    int flags = 0;
    for (int rep = 0; rep < opt.repetitions; ++rep) {
        auto picks = sample_without_replacement(n_c, opt.k, rng);
        for (int s = 0; s < opt.k; ++s) {
            sample[static_cast<std::size_t>(s)] =
                candidate_stats[static_cast<std::size_t>(picks[static_cast<std::size_t>(s)])];
        }
        flags += pooled_test(sample, fs.model.pdf, opt.pfa).flagged ? 1 : 0;
    }
    double p_d = static_cast<double>(flags) / static_cast<double>(opt.repetitions);

    if (!opt.out_json.empty()) {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["lambda"] = fs.model.line.lambda;
        j["eta"] = fs.model.line.eta;
        j["model"] = {{"mean", fs.model.pdf.mean}, {"sd", fs.model.pdf.sd}};
        j["N"] = data.stolen_count;
        j["N_c"] = n_c;
        j["k"] = opt.k;
        j["repetitions"] = opt.repetitions;
        j["pfa"] = opt.pfa;
        j["seed"] = opt.seed;
        j["p_d"] = p_d;
        open_out(opt.out_json) << j.dump(2) << "\n";
    }
    std::cout << "pooled test: P_D " << fmt(p_d) << " over " << opt.repetitions
              << " repetitions (k " << opt.k << ", N/N_c "
              << fmt(static_cast<double>(data.stolen_count) / n_c) << ")\n";
    return kExitOk;
}

int run_triangle_multi(const TriangleOptions& opt) {
    if (opt.forgery_paths.size() < 2) {
        throw ConfigError("triangle multi: at least two --forgery paths required");
    }
    TriangleData data = load_triangle_data(opt);
    std::vector<ImagePlane> forgeries;
    forgeries.reserve(opt.forgery_paths.size());
    for (const auto& path : opt.forgery_paths) forgeries.push_back(load_image(path));
    std::vector<ImagePlane> fit_images(data.pool.begin() + data.fit_begin,
                                       data.pool.begin() + data.fit_begin + data.fit_count);
    MultiForgeryResult result =
        multiple_forgeries_test(forgeries, data.k_alice, fit_images, opt.pfa, data.extract);

    if (!opt.out_csv.empty()) {
        auto f = open_out(opt.out_csv);
        f << "forgery,candidate,flag,pfa\n";
        for (std::size_t i = 0; i < forgeries.size(); ++i) {
            for (std::size_t j = 0; j < forgeries.size(); ++j) {
                if (i == j) continue;
                f << opt.forgery_paths[i] << ',' << opt.forgery_paths[j] << ','
                  << (result.detections[i][j] ? 1 : 0) << ',' << fmt(opt.pfa) << '\n';
            }
        }
    }
    if (!opt.out_json.empty()) {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["pfa"] = opt.pfa;
        j["p_d"] = result.p_d;
        j["mean_p_d"] = result.mean_p_d;
        open_out(opt.out_json) << j.dump(2) << "\n";
    }
    std::cout << "multiple-forgeries test: mean P_D " << fmt(result.mean_p_d) << " over "
              << forgeries.size() << " forgeries\n";
    return kExitOk;
}

int run_bench(const BenchOptions& opt) {
    BenchSuiteConfig cfg;
    cfg.run_l_sweep = !opt.skip_l_sweep;
    if (opt.seed != 0) {
        cfg.identification.seed = derive_seed(opt.seed, 1);
        cfg.confusion.seed = derive_seed(opt.seed, 2);
        cfg.individual.seed = derive_seed(opt.seed, 3);
        cfg.pooled.seed = derive_seed(opt.seed, 4);
        cfg.multi.seed = derive_seed(opt.seed, 5);
        cfg.l_sweep.seed = derive_seed(opt.seed, 6);
    }
    BenchSuiteResult result = run_bench_suite(cfg);
    write_bench_reports(cfg, result, opt.out_dir);
    std::cout << "bench reports written to " << opt.out_dir << "\n";
    std::cout << "  identification: AUC " << fmt(result.identification.auc) << ", hit rate "
              << fmt(result.identification.hit_rate) << ", false alarms "
              << fmt(result.identification.false_alarm_rate) << "\n";
    for (const auto& c : result.confusion.cells) {
        std::cout << "  confusion " << c.method << " A=" << fmt(c.target_psnr) << ": pass rate "
                  << fmt(c.pass_rate) << "\n";
    }
    for (const auto& c : result.individual.cells) {
        std::cout << "  individual " << c.method << " N=" << c.stolen_count << ": P_D "
                  << fmt(c.mean_p_d) << "\n";
    }
    for (const auto& c : result.pooled.cells) {
        std::cout << "  pooled " << c.method << " N/N_c=" << fmt(c.ratio) << ": P_D "
                  << fmt(c.mean_p_d) << "\n";
    }
    for (const auto& c : result.multi.cells) {
        std::cout << "  multi " << c.method << ": P_D " << fmt(c.mean_p_d) << "\n";
    }
    for (const auto& c : result.l_sweep.cells) {
        std::cout << "  l-sweep l=" << c.block_side << ": P_D " << fmt(c.p_d) << ", P_fa "
                  << fmt(c.p_fa) << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PRNU camera identification, block-wise fingerprint-copy attack, and triangle-test toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file; command-line flags override file values");
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = hardware)")->capture_default_str();

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic camera dataset");
    sim_cmd->add_option("--out", sim.out_dir, "output directory")->required();
    sim_cmd->add_option("--width", sim.config.width)->capture_default_str();
    sim_cmd->add_option("--height", sim.config.height)->capture_default_str();
    sim_cmd->add_option("--pool", sim.config.alice_pool, "Alice natural pool size")->capture_default_str();
    sim_cmd->add_option("--flatfield", sim.config.alice_flatfield)->capture_default_str();
    sim_cmd->add_option("--negatives", sim.config.negatives)->capture_default_str();
    sim_cmd->add_option("--targets", sim.config.eve_targets)->capture_default_str();
    sim_cmd->add_option("--neg-cameras", sim.config.negative_cameras)->capture_default_str();
    sim_cmd->add_option("--sigma-k", sim.config.sigma_k)->capture_default_str();
    sim_cmd->add_option("--read-noise", sim.config.read_noise_sd)->capture_default_str();
    sim_cmd->add_option("--shot-gain", sim.config.shot_noise_gain)->capture_default_str();
    sim_cmd->add_option("--seed", sim.config.seed)->capture_default_str();

    FingerprintOptions fpo;
    auto* fp_cmd = app.add_subcommand("fingerprint", "estimate a fingerprint from a manifest role");
    fp_cmd->add_option("--manifest", fpo.manifest_path)->required();
    fp_cmd->add_option("--role", fpo.role)->capture_default_str();
    fp_cmd->add_option("--out", fpo.out_path)->required();
    fp_cmd->add_option("--sigma", fpo.sigma, "extraction noise sd")->capture_default_str();

    IdentifyOptions ido;
    auto* id_cmd = app.add_subcommand("identify", "score images against a fingerprint");
    id_cmd->add_option("--manifest", ido.manifest_path)->required();
    id_cmd->add_option("--fingerprint", ido.fingerprint_path)->required();
    id_cmd->add_option("--role", ido.role, "role of the images to score")->capture_default_str();
    id_cmd->add_option("--pfa", ido.pfa)->capture_default_str();
    id_cmd->add_option("--sigma", ido.sigma)->capture_default_str();
    id_cmd->add_option("--out-csv", ido.out_csv);
    id_cmd->add_option("--out-model", ido.out_model);

    AttackOptions ato;
    auto* at_cmd = app.add_subcommand("attack", "create a fingerprint-copy forgery");
    at_cmd->add_option("--manifest", ato.manifest_path)->required();
    at_cmd->add_option("--target-index", ato.target_index, "index into the eve_target role")
        ->capture_default_str();
    at_cmd->add_option("--target", ato.target_path, "explicit target image path");
    at_cmd->add_option("--method", ato.method, "block | conventional")->capture_default_str();
    at_cmd->add_option("--n", ato.stolen_count, "stolen images N (taken from alice_pool)")
        ->capture_default_str();
    at_cmd->add_option("--r", ato.subset_size, "images per block r")->capture_default_str();
    at_cmd->add_option("--l", ato.block_side, "block side l")->capture_default_str();
    at_cmd->add_option("--a,--A", ato.target_psnr, "target PSNR A in dB")->capture_default_str();
    at_cmd->add_option("--seed", ato.seed)->capture_default_str();
    at_cmd->add_option("--predenoise-sigma", ato.predenoise_sigma)->capture_default_str();
    at_cmd->add_option("--sigma", ato.sigma, "extraction noise sd")->capture_default_str();
    at_cmd->add_option("--out", ato.out_path)->required();
    at_cmd->add_option("--sidecar", ato.sidecar_path, "sidecar JSON path (default <out>.json)");

    TriangleOptions tro;
    auto* tr_cmd = app.add_subcommand("triangle", "triangle-test suite");
    tr_cmd->require_subcommand(1);
    auto add_triangle_common = [&](CLI::App* cmd, bool multi) {
        cmd->add_option("--manifest", tro.manifest_path)->required();
        cmd->add_option("--fingerprint", tro.fingerprint_path)->required();
        auto* fo = cmd->add_option("--forgery", tro.forgery_paths, "forged image path");
        if (multi) {
            fo->expected(2,CLI::detail::expected_max_vector_size)->required();
        } else {
            fo->expected(1)->required();
        }
        cmd->add_option("--stolen-count", tro.stolen_count,
                        "leading alice_pool images treated as Eve's stolen set")
            ->required();
        cmd->add_option("--fit-count", tro.fit_count, "unused images for the line/pdf fit")
            ->capture_default_str();
        cmd->add_option("--pfa", tro.pfa)->capture_default_str();
        cmd->add_option("--sigma", tro.sigma)->capture_default_str();
        cmd->add_option("--out-csv", tro.out_csv);
        cmd->add_option("--out-json", tro.out_json);
    };
    auto* tr_ind = tr_cmd->add_subcommand("individual", "per-candidate test");
    add_triangle_common(tr_ind, false);
    auto* tr_pool = tr_cmd->add_subcommand("pooled", "set-level p-value test");
    add_triangle_common(tr_pool, false);
    tr_pool->add_option("--k", tro.k, "subset size per repetition")->capture_default_str();
    tr_pool->add_option("--reps", tro.repetitions)->capture_default_str();
    tr_pool->add_option("--candidates", tro.candidate_count, "candidate count N_c (default N)")
        ->capture_default_str();
    tr_pool->add_option("--seed", tro.seed)->capture_default_str();
    auto* tr_multi = tr_cmd->add_subcommand("multi", "forgeries as candidates");
    add_triangle_common(tr_multi, true);

    BenchOptions bno;
    auto* bn_cmd = app.add_subcommand("bench", "run the desk-scale experiment suite");
    bn_cmd->add_option("--out", bno.out_dir, "report directory")->required();
    bn_cmd->add_option("--seed", bno.seed, "override the per-experiment base seeds")
        ->capture_default_str();
    bn_cmd->add_flag("--skip-l-sweep", bno.skip_l_sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        set_default_thread_count(threads);
        if (sim_cmd->parsed()) return run_simulate(sim);
        if (fp_cmd->parsed()) return run_fingerprint(fpo);
        if (id_cmd->parsed()) return run_identify(ido);
        if (at_cmd->parsed()) return run_attack(ato);
        if (tr_cmd->parsed()) {
            if (tr_ind->parsed()) return run_triangle_individual(tro);
            if (tr_pool->parsed()) return run_triangle_pooled(tro);
            if (tr_multi->parsed()) return run_triangle_multi(tro);
        }
        if (bn_cmd->parsed()) return run_bench(bno);
        std::cerr << "error: no subcommand\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
