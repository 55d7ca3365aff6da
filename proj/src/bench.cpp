#include "prnu/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "prnu/error.hpp"
#include "prnu/parallel.hpp"
#include "prnu/rng.hpp"
#include "prnu/stats.hpp"

namespace prnu {

namespace {

constexpr std::uint64_t kTagAlice = 1;
constexpr std::uint64_t kTagEve = 2;
constexpr std::uint64_t kTagNegCam = 16;
constexpr std::uint64_t kTagTestCam = 32;
constexpr std::uint64_t kTagPool = 100;
constexpr std::uint64_t kTagFlat = 101;
constexpr std::uint64_t kTagNegatives = 102;
constexpr std::uint64_t kTagTargets = 103;
constexpr std::uint64_t kTagMatched = 104;
constexpr std::uint64_t kTagForgery = 200;
constexpr std::uint64_t kTagPooledReps = 300;
constexpr std::uint64_t kTagPooledNull = 301;

constexpr std::uint64_t kMethodConventional = 1;
constexpr std::uint64_t kMethodBlock = 2;

std::vector<ImagePlane> shoot_textured(const SyntheticCamera& cam, int count, std::uint64_t seed,
                                       std::uint64_t tag, int octaves) {
    std::vector<ImagePlane> images(static_cast<std::size_t>(count));
    parallel_for(count, [&](int i) {
        SceneSpec scene = textured_scene(cam.prnu.width, cam.prnu.height, octaves,
                                         derive_seed(seed, tag, static_cast<std::uint64_t>(i)));
        images[static_cast<std::size_t>(i)] = capture(cam, scene);
    });
    return images;
}

std::vector<ImagePlane> shoot_flat(const SyntheticCamera& cam, int count, std::uint64_t seed) {
    std::vector<ImagePlane> images(static_cast<std::size_t>(count));
    parallel_for(count, [&](int i) {
        std::uint64_t scene_seed = derive_seed(seed, kTagFlat, static_cast<std::uint64_t>(i));
        Rng level_rng(scene_seed);
        double level = 118.0 + static_cast<double>(level_rng.next_below(21));
        images[static_cast<std::size_t>(i)] =
            capture(cam, flat_scene(cam.prnu.width, cam.prnu.height, level, scene_seed));
    });
    return images;
}

std::vector<RasterF32> batch_residuals(const std::vector<ImagePlane>& images,
                                       const DenoiseParams& p) {
    std::vector<RasterF32> out(images.size());
    parallel_for(static_cast<int>(images.size()), [&](int i) {
        out[static_cast<std::size_t>(i)] = residual(images[static_cast<std::size_t>(i)], p);
    });
    return out;
}

std::vector<double> batch_detect(const std::vector<ImagePlane>& images,
                                 const std::vector<RasterF32>& residuals, const Fingerprint& k) {
    std::vector<double> out(images.size());
    parallel_for(static_cast<int>(images.size()), [&](int i) {
        auto idx = static_cast<std::size_t>(i);
        out[idx] = detect_with_residual(images[idx], residuals[idx], k);
    });
    return out;
}

std::vector<double> batch_corr(const std::vector<RasterF32>& pool_res, const RasterF32& w_forged) {
    std::vector<double> out(pool_res.size());
    parallel_for(static_cast<int>(pool_res.size()), [&](int i) {
        out[static_cast<std::size_t>(i)] = correlation(pool_res[static_cast<std::size_t>(i)], w_forged);
    });
    return out;
}

ForgeryRecord make_forgery(std::uint64_t method, const ImagePlane& target,
                           std::span<const ImagePlane> stolen, std::span<const RasterF32> residuals,
                           int block_side, int subset_size, double target_psnr, std::uint64_t seed,
                           const DenoiseParams& extract, double predenoise_sigma) {
    if (method == kMethodConventional) {
        return conventional_attack_with_residuals(target, stolen, residuals, target_psnr, extract,
                                                  predenoise_sigma);
    }
    AttackParams params;
    params.block_side = block_side;
    params.subset_size = subset_size;
    params.target_psnr = target_psnr;
    params.seed = seed;
    params.predenoise_sigma = predenoise_sigma;
    return block_attack_with_residuals(target, stolen, residuals, params, extract);
}

const char* method_name(std::uint64_t method) {
    return method == kMethodConventional ? "conventional" : "block";
}

} // namespace

IdentificationResult run_identification(const IdentificationConfig& cfg) {
    DenoiseParams extract = extraction_params(cfg.extract_sigma);

    SyntheticCamera alice = make_camera("alice", cfg.width, cfg.height, cfg.sigma_k,
                                        cfg.read_noise_sd, 0.0, derive_seed(cfg.seed, kTagAlice));
    std::vector<SyntheticCamera> calib_cams;
    std::vector<SyntheticCamera> test_cams;
    for (int i = 0; i < 4; ++i) {
        calib_cams.push_back(make_camera("neg" + std::to_string(i), cfg.width, cfg.height,
                                         cfg.sigma_k, cfg.read_noise_sd, 0.0,
                                         derive_seed(cfg.seed, kTagNegCam + static_cast<std::uint64_t>(i))));
        test_cams.push_back(make_camera("test" + std::to_string(i), cfg.width, cfg.height,
                                        cfg.sigma_k, cfg.read_noise_sd, 0.0,
                                        derive_seed(cfg.seed, kTagTestCam + static_cast<std::uint64_t>(i))));
    }

    std::vector<ImagePlane> flats = shoot_flat(alice, cfg.estimation_images, cfg.seed);
    Fingerprint k_alice = estimate_fingerprint(flats, extract);

    std::vector<ImagePlane> matched =
        shoot_textured(alice, cfg.matched_test, cfg.seed, kTagMatched, cfg.scene_octaves);

    auto shoot_round_robin = [&](std::vector<SyntheticCamera>& cams, int count, std::uint64_t tag) {
        std::vector<ImagePlane> images(static_cast<std::size_t>(count));
        parallel_for(count, [&](int i) {
            const SyntheticCamera& cam = cams[static_cast<std::size_t>(i) % cams.size()];
            SceneSpec scene = textured_scene(cfg.width, cfg.height, cfg.scene_octaves,
                                             derive_seed(cfg.seed, tag, static_cast<std::uint64_t>(i)));
            images[static_cast<std::size_t>(i)] = capture(cam, scene);
        });
        return images;
    };
    std::vector<ImagePlane> calib = shoot_round_robin(calib_cams, cfg.calibration_negatives,
                                                      kTagNegatives);
    std::vector<ImagePlane> unmatched = shoot_round_robin(test_cams, cfg.unmatched_test,
                                                          kTagNegatives + 1);

    auto scores_of = [&](const std::vector<ImagePlane>& images) {
        std::vector<double> scores(images.size());
        parallel_for(static_cast<int>(images.size()), [&](int i) {
            scores[static_cast<std::size_t>(i)] =
                detect(images[static_cast<std::size_t>(i)], k_alice, extract);
        });
        return scores;
    };

    std::vector<double> matched_scores = scores_of(matched);
    std::vector<double> calib_scores = scores_of(calib);
    std::vector<double> unmatched_scores = scores_of(unmatched);

    DetectorModel model = calibrate_threshold(calib_scores, cfg.pfa);

    IdentificationResult result;
    result.threshold = model.threshold;
    result.auc = roc_auc(matched_scores, unmatched_scores);
    int hits = 0;
    for (double s : matched_scores) hits += (s > model.threshold) ? 1 : 0;
    result.hit_rate = static_cast<double>(hits) / static_cast<double>(matched_scores.size());
    int fas = 0;
    for (double s : unmatched_scores) fas += (s > model.threshold) ? 1 : 0;
    result.false_alarm_rate = static_cast<double>(fas) / static_cast<double>(unmatched_scores.size());
    result.matched_mean = mean(matched_scores);
    result.unmatched_mean = mean(unmatched_scores);
    return result;
}

AttackConfusionResult run_attack_confusion(const AttackConfusionConfig& cfg) {
    DenoiseParams extract = extraction_params(cfg.extract_sigma);

    SyntheticCamera alice = make_camera("alice", cfg.width, cfg.height, cfg.sigma_k,
                                        cfg.read_noise_sd, 0.0, derive_seed(cfg.seed, kTagAlice));
    SyntheticCamera eve = make_camera("eve", cfg.width, cfg.height, cfg.sigma_k, cfg.read_noise_sd,
                                      0.0, derive_seed(cfg.seed, kTagEve));
    std::vector<SyntheticCamera> neg_cams;
    for (int i = 0; i < 4; ++i) {
        neg_cams.push_back(make_camera("neg" + std::to_string(i), cfg.width, cfg.height, cfg.sigma_k,
                                       cfg.read_noise_sd, 0.0,
                                       derive_seed(cfg.seed, kTagNegCam + static_cast<std::uint64_t>(i))));
    }

    std::vector<ImagePlane> flats = shoot_flat(alice, cfg.flatfield_count, cfg.seed);
    Fingerprint k_alice = estimate_fingerprint(flats, extract);

    std::vector<ImagePlane> negatives(static_cast<std::size_t>(cfg.calibration_negatives));
    parallel_for(cfg.calibration_negatives, [&](int i) {
        const SyntheticCamera& cam = neg_cams[static_cast<std::size_t>(i) % neg_cams.size()];
        SceneSpec scene = textured_scene(cfg.width, cfg.height, cfg.scene_octaves,
                                         derive_seed(cfg.seed, kTagNegatives, static_cast<std::uint64_t>(i)));
        negatives[static_cast<std::size_t>(i)] = capture(cam, scene);
    });
    std::vector<double> negative_scores(negatives.size());
    parallel_for(static_cast<int>(negatives.size()), [&](int i) {
        negative_scores[static_cast<std::size_t>(i)] =
            detect(negatives[static_cast<std::size_t>(i)], k_alice, extract);
    });
    DetectorModel model = calibrate_threshold(negative_scores, cfg.pfa);

    std::vector<ImagePlane> stolen =
        shoot_textured(alice, cfg.stolen_count, cfg.seed, kTagPool, cfg.scene_octaves);
    std::vector<RasterF32> stolen_res = batch_residuals(stolen, extract);
    std::vector<ImagePlane> targets =
        shoot_textured(eve, cfg.target_count, cfg.seed, kTagTargets, cfg.scene_octaves);

    AttackConfusionResult result;
    result.threshold = model.threshold;

    for (std::size_t ai = 0; ai < cfg.psnr_targets.size(); ++ai) {
        double a = cfg.psnr_targets[ai];
        for (std::uint64_t method : {kMethodConventional, kMethodBlock}) {
            AttackConfusionCell cell;
            cell.method = method_name(method);
            cell.target_psnr = a;
            cell.stolen_count = cfg.stolen_count;
            cell.subset_size = (method == kMethodBlock) ? cfg.subset_size : cfg.stolen_count;
            cell.block_side = (method == kMethodBlock) ? cfg.block_side
                                                       : std::max(cfg.width, cfg.height);
            cell.seed = derive_seed(cfg.seed, kTagForgery, method, static_cast<std::uint64_t>(ai));
            cell.forgeries = cfg.target_count;

            int passes = 0;
            double psnr_sum = 0.0;
            std::vector<double> rhos(targets.size());
            std::vector<ForgeryRecord> records(targets.size());
            parallel_for(static_cast<int>(targets.size()), [&](int t) {
                auto ti = static_cast<std::size_t>(t);
                ForgeryRecord rec = make_forgery(
                    method, targets[ti], stolen, stolen_res, cfg.block_side, cfg.subset_size, a,
                    derive_seed(cell.seed, static_cast<std::uint64_t>(t)), extract,
                    cfg.predenoise_sigma);
                rhos[ti] = detect(rec.forged, k_alice, extract);
                records[ti] = std::move(rec);
            }, 1);
            for (std::size_t ti = 0; ti < targets.size(); ++ti) {
                const ForgeryRecord& rec = records[ti];
                passes += (rhos[ti] > model.threshold) ? 1 : 0;
                psnr_sum += rec.overall_psnr;
                cell.max_overall_psnr_error =
                    std::max(cell.max_overall_psnr_error, std::abs(rec.overall_psnr - a));
                for (const auto& b : rec.blocks) {
                    if (b.flagged) {
                        ++cell.flagged_blocks;
                    } else {
                        cell.max_block_psnr_error =
                            std::max(cell.max_block_psnr_error, std::abs(b.psnr_db - a));
                    }
                }
            }
            cell.pass_rate = static_cast<double>(passes) / static_cast<double>(targets.size());
            cell.mean_overall_psnr = psnr_sum / static_cast<double>(targets.size());
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

namespace {

/// Shared scaffolding for the triangle experiments: Alice pool with cached
/// residuals and detector responses, Alice fingerprint, Eve targets.
struct TriangleBench {
    DenoiseParams extract;
    Fingerprint k_alice;
    SyntheticCamera alice;
    SyntheticCamera eve;
    std::vector<ImagePlane> pool;
    std::vector<RasterF32> pool_res;
    std::vector<double> pool_c_ik;
    std::vector<ImagePlane> targets;
};

TriangleBench make_triangle_bench(int width, int height, double sigma_k, double read_noise_sd,
                                  int pool_count, int flat_count, int target_count,
                                  double extract_sigma, int scene_octaves, std::uint64_t seed) {
    TriangleBench bench;
    bench.extract = extraction_params(extract_sigma);
    bench.alice = make_camera("alice", width, height, sigma_k, read_noise_sd, 0.0,
                              derive_seed(seed, kTagAlice));
    bench.eve = make_camera("eve", width, height, sigma_k, read_noise_sd, 0.0,
                            derive_seed(seed, kTagEve));
    std::vector<ImagePlane> flats = shoot_flat(bench.alice, flat_count, seed);
    bench.k_alice = estimate_fingerprint(flats, bench.extract);
    bench.pool = shoot_textured(bench.alice, pool_count, seed, kTagPool, scene_octaves);
    bench.pool_res = batch_residuals(bench.pool, bench.extract);
    bench.pool_c_ik = batch_detect(bench.pool, bench.pool_res, bench.k_alice);
    bench.targets = shoot_textured(bench.eve, target_count, seed, kTagTargets, scene_octaves);
    return bench;
}

struct ForgeryTriangle {
    ForgeryRecord record;
    RasterF32 res;
    double c_jk = 0.0;
    std::vector<double> pool_c_true; // correlation with every pool residual
};

ForgeryTriangle evaluate_forgery(const TriangleBench& bench, std::uint64_t method,
                                 const ImagePlane& target, std::span<const ImagePlane> stolen,
                                 std::span<const RasterF32> stolen_res, int block_side,
                                 int subset_size, double target_psnr, std::uint64_t seed,
                                 double predenoise_sigma) {
    ForgeryTriangle out;
    out.record = make_forgery(method, target, stolen, stolen_res, block_side, subset_size,
                              target_psnr, seed, bench.extract, predenoise_sigma);
    out.res = residual(out.record.forged, bench.extract);
    out.c_jk = detect_with_residual(out.record.forged, out.res, bench.k_alice);
    out.pool_c_true = batch_corr(bench.pool_res, out.res);
    return out;
}

TriangleModel fit_model_on(const TriangleBench& bench, const ForgeryTriangle& forgery,
                           int fit_begin, int fit_count) {
    std::vector<double> c_est(static_cast<std::size_t>(fit_count));
    std::vector<double> c_true(static_cast<std::size_t>(fit_count));
    for (int i = 0; i < fit_count; ++i) {
        auto idx = static_cast<std::size_t>(fit_begin + i);
        c_est[static_cast<std::size_t>(i)] = estimate_c(bench.pool_c_ik[idx], forgery.c_jk);
        c_true[static_cast<std::size_t>(i)] = forgery.pool_c_true[idx];
    }
    return fit_triangle_model(c_est, c_true);
}

std::vector<TriangleRecord> records_for_range(const TriangleBench& bench,
                                              const ForgeryTriangle& forgery,
                                              const TriangleModel& model, int begin, int count) {
    std::vector<TriangleRecord> records(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        auto idx = static_cast<std::size_t>(begin + i);
        TriangleRecord& rec = records[static_cast<std::size_t>(i)];
        rec.candidate_id = begin + i;
        rec.c_true = forgery.pool_c_true[idx];
        rec.c_est = estimate_c(bench.pool_c_ik[idx], forgery.c_jk);
        rec.statistic = triangle_statistic(rec.c_true, rec.c_est, model.line);
    }
    return records;
}

} // namespace

IndividualSweepResult run_individual_sweep(const IndividualSweepConfig& cfg) {
    int max_stolen = *std::max_element(cfg.stolen_grid.begin(), cfg.stolen_grid.end());
    int pool_count = max_stolen + cfg.fit_count + cfg.null_eval_count;
    TriangleBench bench =
        make_triangle_bench(cfg.width, cfg.height, cfg.sigma_k, cfg.read_noise_sd, pool_count,
                            cfg.flatfield_count, cfg.forgeries, cfg.extract_sigma,
                            cfg.scene_octaves, cfg.seed);

    int fit_begin = max_stolen;
    int null_begin = max_stolen + cfg.fit_count;

    IndividualSweepResult result;
    for (int n : cfg.stolen_grid) {
        std::span<const ImagePlane> stolen(bench.pool.data(), static_cast<std::size_t>(n));
        std::span<const RasterF32> stolen_res(bench.pool_res.data(), static_cast<std::size_t>(n));
        for (std::uint64_t method : {kMethodConventional, kMethodBlock}) {
            IndividualSweepCell cell;
            cell.method = method_name(method);
            cell.stolen_count = n;
            cell.target_psnr = cfg.target_psnr;
            cell.seed = derive_seed(cfg.seed, kTagForgery, method, static_cast<std::uint64_t>(n));
            cell.max_statistic = -std::numeric_limits<double>::infinity();

            int stolen_flags = 0;
            int null_flags = 0;
            for (int t = 0; t < cfg.forgeries; ++t) {
                ForgeryTriangle forgery = evaluate_forgery(
                    bench, method, bench.targets[static_cast<std::size_t>(t)], stolen, stolen_res,
                    cfg.block_side, cfg.subset_size, cfg.target_psnr,
                    derive_seed(cell.seed, static_cast<std::uint64_t>(t)), cfg.predenoise_sigma);
                TriangleModel model = fit_model_on(bench, forgery, fit_begin, cfg.fit_count);

                auto stolen_records = records_for_range(bench, forgery, model, 0, n);
                IndividualTestResult stolen_test = individual_test(stolen_records, model.pdf, cfg.pfa);
                stolen_flags += stolen_test.flag_count;
                cell.max_statistic = std::max(cell.max_statistic, stolen_test.max_statistic);

                auto null_records =
                    records_for_range(bench, forgery, model, null_begin, cfg.null_eval_count);
                IndividualTestResult null_test =
                    individual_test(null_records, model.pdf, cfg.null_pfa);
                null_flags += null_test.flag_count;
            }
            cell.stolen_evaluations = n * cfg.forgeries;
            cell.null_evaluations = cfg.null_eval_count * cfg.forgeries;
            cell.mean_p_d = static_cast<double>(stolen_flags) / cell.stolen_evaluations;
            cell.null_flag_rate = static_cast<double>(null_flags) / cell.null_evaluations;
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

PooledResult run_pooled(const PooledConfig& cfg) {
    for (double ratio : cfg.ratios) {
        int n_c = static_cast<int>(std::lround(cfg.stolen_count / ratio));
        if (n_c - cfg.stolen_count > cfg.unused_candidates) {
            throw ConfigError("pooled: unused_candidates too small for ratio grid");
        }
        if (cfg.k > n_c) throw ConfigError("pooled: k larger than candidate set");
    }

    int pool_count = cfg.stolen_count + cfg.unused_candidates + cfg.fit_count;
    TriangleBench bench =
        make_triangle_bench(cfg.width, cfg.height, cfg.sigma_k, cfg.read_noise_sd, pool_count,
                            cfg.flatfield_count, cfg.forgeries, cfg.extract_sigma,
                            cfg.scene_octaves, cfg.seed);

    int unused_begin = cfg.stolen_count;
    int fit_begin = cfg.stolen_count + cfg.unused_candidates;
    std::span<const ImagePlane> stolen(bench.pool.data(), static_cast<std::size_t>(cfg.stolen_count));
    std::span<const RasterF32> stolen_res(bench.pool_res.data(),
                                          static_cast<std::size_t>(cfg.stolen_count));

    PooledResult result;
    long null_small = 0;
    long null_total = 0;

    for (std::uint64_t method : {kMethodConventional, kMethodBlock}) {
        std::vector<std::vector<double>> forgery_stats(static_cast<std::size_t>(cfg.forgeries));
        std::vector<ResidualModel> forgery_models(static_cast<std::size_t>(cfg.forgeries));
        std::uint64_t method_seed = derive_seed(cfg.seed, kTagForgery, method);

        for (int t = 0; t < cfg.forgeries; ++t) {
            ForgeryTriangle forgery = evaluate_forgery(
                bench, method, bench.targets[static_cast<std::size_t>(t)], stolen, stolen_res,
                cfg.block_side, cfg.subset_size, cfg.target_psnr,
                derive_seed(method_seed, static_cast<std::uint64_t>(t)), cfg.predenoise_sigma);
            TriangleModel model = fit_model_on(bench, forgery, fit_begin, cfg.fit_count);
            forgery_models[static_cast<std::size_t>(t)] = model.pdf;

            // Statistics for every potential candidate (stolen + unused).
            std::vector<double>& stats = forgery_stats[static_cast<std::size_t>(t)];
            stats.resize(static_cast<std::size_t>(fit_begin));
            for (int i = 0; i < fit_begin; ++i) {
                auto idx = static_cast<std::size_t>(i);
                stats[idx] = triangle_statistic(forgery.pool_c_true[idx],
                                                estimate_c(bench.pool_c_ik[idx], forgery.c_jk),
                                                model.line);
            }

            // Null calibration on unused-only subsets.
            Rng null_rng(derive_seed(method_seed, kTagPooledNull, static_cast<std::uint64_t>(t)));
            int reps = cfg.null_subsets / (2 * cfg.forgeries);
            std::vector<double> sample(static_cast<std::size_t>(cfg.k));
            for (int repi = 0; repi < reps; ++repi) {
                auto picks = sample_without_replacement(cfg.unused_candidates, cfg.k, null_rng);
                for (int s = 0; s < cfg.k; ++s) {
                    sample[static_cast<std::size_t>(s)] =
                        stats[static_cast<std::size_t>(unused_begin + picks[static_cast<std::size_t>(s)])];
                }
                PooledTestResult null_res = pooled_test(sample, model.pdf, cfg.pfa);
                null_small += (null_res.p_value < cfg.null_alpha) ? 1 : 0;
                ++null_total;
            }
        }

        for (std::size_t ri = 0; ri < cfg.ratios.size(); ++ri) {
            double ratio = cfg.ratios[ri];
            int n_c = static_cast<int>(std::lround(cfg.stolen_count / ratio));
            PooledCell cell;
            cell.method = method_name(method);
            cell.ratio = ratio;
            cell.stolen_count = cfg.stolen_count;
            cell.candidate_count = n_c;
            cell.k = cfg.k;
            cell.repetitions = cfg.repetitions;
            cell.seed = derive_seed(method_seed, kTagPooledReps, static_cast<std::uint64_t>(ri));

            double p_d_sum = 0.0;
            std::vector<double> p_d(static_cast<std::size_t>(cfg.forgeries));
            parallel_for(cfg.forgeries, [&](int t) {
                const std::vector<double>& stats = forgery_stats[static_cast<std::size_t>(t)];
                const ResidualModel& model = forgery_models[static_cast<std::size_t>(t)];
                Rng rep_rng(derive_seed(cell.seed, static_cast<std::uint64_t>(t)));
                std::vector<double> sample(static_cast<std::size_t>(cfg.k));
                int flags = 0;
                for (int repi = 0; repi < cfg.repetitions; ++repi) {
                    auto picks = sample_without_replacement(n_c, cfg.k, rep_rng);
                    for (int s = 0; s < cfg.k; ++s) {
                        int candidate = picks[static_cast<std::size_t>(s)];
                        // Candidate order: stolen images first, then unused.
                        sample[static_cast<std::size_t>(s)] = stats[static_cast<std::size_t>(candidate)];
                    }
                    PooledTestResult res = pooled_test(sample, model, cfg.pfa);
                    flags += res.flagged ? 1 : 0;
                }
                p_d[static_cast<std::size_t>(t)] =
                    static_cast<double>(flags) / static_cast<double>(cfg.repetitions);
            });
            for (double v : p_d) p_d_sum += v;
            cell.mean_p_d = p_d_sum / static_cast<double>(cfg.forgeries);
            result.cells.push_back(std::move(cell));
        }
    }

    result.null_small_p_fraction =
        null_total > 0 ? static_cast<double>(null_small) / static_cast<double>(null_total) : 0.0;
    return result;
}

MultiForgeryBenchResult run_multi_forgery(const MultiForgeryConfig& cfg) {
    int pool_count = cfg.stolen_count + cfg.fit_count;
    TriangleBench bench =
        make_triangle_bench(cfg.width, cfg.height, cfg.sigma_k, cfg.read_noise_sd, pool_count,
                            cfg.flatfield_count, cfg.forgeries, cfg.extract_sigma,
                            cfg.scene_octaves, cfg.seed);

    std::span<const ImagePlane> stolen(bench.pool.data(), static_cast<std::size_t>(cfg.stolen_count));
    std::span<const RasterF32> stolen_res(bench.pool_res.data(),
                                          static_cast<std::size_t>(cfg.stolen_count));
    std::vector<ImagePlane> fit_images(bench.pool.begin() + cfg.stolen_count, bench.pool.end());

    MultiForgeryBenchResult result;
    for (std::uint64_t method : {kMethodConventional, kMethodBlock}) {
        MultiForgeryCell cell;
        cell.method = method_name(method);
        cell.stolen_count = cfg.stolen_count;
        cell.target_psnr = cfg.target_psnr;
        cell.seed = derive_seed(cfg.seed, kTagForgery, method);
        cell.forgeries = cfg.forgeries;

        std::vector<ImagePlane> forgeries(static_cast<std::size_t>(cfg.forgeries));
        parallel_for(cfg.forgeries, [&](int t) {
            ForgeryRecord rec = make_forgery(
                method, bench.targets[static_cast<std::size_t>(t)], stolen, stolen_res,
                cfg.block_side, cfg.subset_size, cfg.target_psnr,
                derive_seed(cell.seed, static_cast<std::uint64_t>(t)), bench.extract,
                cfg.predenoise_sigma);
            forgeries[static_cast<std::size_t>(t)] = std::move(rec.forged);
        }, 1);

        MultiForgeryResult test =
            multiple_forgeries_test(forgeries, bench.k_alice, fit_images, cfg.pfa, bench.extract);
        cell.mean_p_d = test.mean_p_d;
        result.cells.push_back(std::move(cell));
    }
    return result;
}

LSweepResult run_l_sweep(const LSweepConfig& cfg) {
    int pool_count = cfg.stolen_count + cfg.fit_count;
    TriangleBench bench =
        make_triangle_bench(cfg.width, cfg.height, cfg.sigma_k, cfg.read_noise_sd, pool_count,
                            cfg.flatfield_count, cfg.forgeries, cfg.extract_sigma,
                            cfg.scene_octaves, cfg.seed);

    std::vector<SyntheticCamera> neg_cams;
    for (int i = 0; i < 4; ++i) {
        neg_cams.push_back(make_camera("neg" + std::to_string(i), cfg.width, cfg.height, cfg.sigma_k,
                                       cfg.read_noise_sd, 0.0,
                                       derive_seed(cfg.seed, kTagNegCam + static_cast<std::uint64_t>(i))));
    }
    std::vector<double> negative_scores(static_cast<std::size_t>(cfg.calibration_negatives));
    parallel_for(cfg.calibration_negatives, [&](int i) {
        const SyntheticCamera& cam = neg_cams[static_cast<std::size_t>(i) % neg_cams.size()];
        SceneSpec scene = textured_scene(cfg.width, cfg.height, cfg.scene_octaves,
                                         derive_seed(cfg.seed, kTagNegatives, static_cast<std::uint64_t>(i)));
        ImagePlane img = capture(cam, scene);
        negative_scores[static_cast<std::size_t>(i)] = detect(img, bench.k_alice, bench.extract);
    });
    DetectorModel t1 = calibrate_threshold(negative_scores, cfg.identification_pfa);

    std::span<const ImagePlane> stolen(bench.pool.data(), static_cast<std::size_t>(cfg.stolen_count));
    std::span<const RasterF32> stolen_res(bench.pool_res.data(),
                                          static_cast<std::size_t>(cfg.stolen_count));
    int fit_begin = cfg.stolen_count;

    LSweepResult result;
    for (int l : cfg.block_grid) {
        LSweepCell cell;
        cell.block_side = l;
        cell.seed = derive_seed(cfg.seed, kTagForgery, static_cast<std::uint64_t>(l));
        cell.max_statistic = -std::numeric_limits<double>::infinity();

        int stolen_flags = 0;
        int passes = 0;
        for (int t = 0; t < cfg.forgeries; ++t) {
            ForgeryTriangle forgery = evaluate_forgery(
                bench, kMethodBlock, bench.targets[static_cast<std::size_t>(t)], stolen, stolen_res,
                l, cfg.subset_size, cfg.target_psnr,
                derive_seed(cell.seed, static_cast<std::uint64_t>(t)), cfg.predenoise_sigma);
            passes += (forgery.c_jk > t1.threshold) ? 1 : 0;
            TriangleModel model = fit_model_on(bench, forgery, fit_begin, cfg.fit_count);
            auto stolen_records = records_for_range(bench, forgery, model, 0, cfg.stolen_count);
            IndividualTestResult test = individual_test(stolen_records, model.pdf, cfg.pfa);
            stolen_flags += test.flag_count;
            cell.max_statistic = std::max(cell.max_statistic, test.max_statistic);
        }
        cell.p_d = static_cast<double>(stolen_flags) /
                   static_cast<double>(cfg.stolen_count * cfg.forgeries);
        cell.p_fa = static_cast<double>(passes) / static_cast<double>(cfg.forgeries);
        result.cells.push_back(std::move(cell));
    }
    return result;
}

BenchSuiteResult run_bench_suite(const BenchSuiteConfig& cfg) {
    BenchSuiteResult result;
    result.identification = run_identification(cfg.identification);
    result.confusion = run_attack_confusion(cfg.confusion);
    result.individual = run_individual_sweep(cfg.individual);
    result.pooled = run_pooled(cfg.pooled);
    result.multi = run_multi_forgery(cfg.multi);
    if (cfg.run_l_sweep) result.l_sweep = run_l_sweep(cfg.l_sweep);
    return result;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_report(const std::string& dir, const std::string& name) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::trunc);
    if (!f) throw DataError("cannot open report for writing: " + name);
    return f;
}

} // namespace

void write_bench_reports(const BenchSuiteConfig& cfg, const BenchSuiteResult& result,
                         const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    {
        auto f = open_report(out_dir, "identification.csv");
        f << "sigma_k,read_noise_sd,estimation_images,pfa,seed,auc,threshold,hit_rate,false_alarm_rate\n";
        const auto& c = cfg.identification;
        const auto& r = result.identification;
        f << fmt(c.sigma_k) << ',' << fmt(c.read_noise_sd) << ',' << c.estimation_images << ','
          << fmt(c.pfa) << ',' << c.seed << ',' << fmt(r.auc) << ',' << fmt(r.threshold) << ','
          << fmt(r.hit_rate) << ',' << fmt(r.false_alarm_rate) << '\n';
    }
    {
        auto f = open_report(out_dir, "confusion.csv");
        f << "method,A,N,r,l,seed,forgeries,pass_rate,mean_overall_psnr,"
             "max_block_psnr_error,max_overall_psnr_error,flagged_blocks,threshold\n";
        for (const auto& c : result.confusion.cells) {
            f << c.method << ',' << fmt(c.target_psnr) << ',' << c.stolen_count << ','
              << c.subset_size << ',' << c.block_side << ',' << c.seed << ',' << c.forgeries << ','
              << fmt(c.pass_rate) << ',' << fmt(c.mean_overall_psnr) << ','
              << fmt(c.max_block_psnr_error) << ',' << fmt(c.max_overall_psnr_error) << ','
              << c.flagged_blocks << ',' << fmt(result.confusion.threshold) << '\n';
        }
    }
    {
        auto f = open_report(out_dir, "individual.csv");
        f << "method,N,A,r,l,pfa,seed,mean_p_d,null_flag_rate,max_statistic,"
             "stolen_evaluations,null_evaluations\n";
        for (const auto& c : result.individual.cells) {
            f << c.method << ',' << c.stolen_count << ',' << fmt(c.target_psnr) << ','
              << cfg.individual.subset_size << ',' << cfg.individual.block_side << ','
              << fmt(cfg.individual.pfa) << ',' << c.seed << ',' << fmt(c.mean_p_d) << ','
              << fmt(c.null_flag_rate) << ',' << fmt(c.max_statistic) << ','
              << c.stolen_evaluations << ',' << c.null_evaluations << '\n';
        }
    }
    {
        auto f = open_report(out_dir, "pooled.csv");
        f << "method,ratio,N,N_c,k,repetitions,pfa,seed,mean_p_d\n";
        for (const auto& c : result.pooled.cells) {
            f << c.method << ',' << fmt(c.ratio) << ',' << c.stolen_count << ','
              << c.candidate_count << ',' << c.k << ',' << c.repetitions << ','
              << fmt(cfg.pooled.pfa) << ',' << c.seed << ',' << fmt(c.mean_p_d) << '\n';
        }
    }
    {
        auto f = open_report(out_dir, "multi_forgeries.csv");
        f << "method,N,A,r,l,pfa,seed,forgeries,mean_p_d\n";
        for (const auto& c : result.multi.cells) {
            f << c.method << ',' << c.stolen_count << ',' << fmt(c.target_psnr) << ','
              << cfg.multi.subset_size << ',' << cfg.multi.block_side << ',' << fmt(cfg.multi.pfa)
              << ',' << c.seed << ',' << c.forgeries << ',' << fmt(c.mean_p_d) << '\n';
        }
    }
    if (cfg.run_l_sweep) {
        auto f = open_report(out_dir, "l_sweep.csv");
        f << "l,N,r,A,pfa,seed,p_d,p_fa,max_statistic\n";
        for (const auto& c : result.l_sweep.cells) {
            f << c.block_side << ',' << cfg.l_sweep.stolen_count << ',' << cfg.l_sweep.subset_size
              << ',' << fmt(cfg.l_sweep.target_psnr) << ',' << fmt(cfg.l_sweep.pfa) << ','
              << c.seed << ',' << fmt(c.p_d) << ',' << fmt(c.p_fa) << ','
              << fmt(c.max_statistic) << '\n';
        }
    }

    nlohmann::json summary;
    summary["schema_version"] = 1;
    summary["identification"] = {{"auc", result.identification.auc},
                                 {"threshold", result.identification.threshold},
                                 {"hit_rate", result.identification.hit_rate},
                                 {"false_alarm_rate", result.identification.false_alarm_rate},
                                 {"seed", cfg.identification.seed}};
    {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& c : result.confusion.cells) {
            cells.push_back({{"method", c.method},
                             {"A", c.target_psnr},
                             {"N", c.stolen_count},
                             {"r", c.subset_size},
                             {"l", c.block_side},
                             {"seed", c.seed},
                             {"pass_rate", c.pass_rate},
                             {"flagged_blocks", c.flagged_blocks}});
        }
        summary["confusion"] = {{"threshold", result.confusion.threshold},
                                {"cells", std::move(cells)}};
    }
    {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& c : result.individual.cells) {
            cells.push_back({{"method", c.method},
                             {"N", c.stolen_count},
                             {"A", c.target_psnr},
                             {"seed", c.seed},
                             {"mean_p_d", c.mean_p_d},
                             {"null_flag_rate", c.null_flag_rate},
                             {"max_statistic", c.max_statistic}});
        }
        summary["individual"] = std::move(cells);
    }
    {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& c : result.pooled.cells) {
            cells.push_back({{"method", c.method},
                             {"ratio", c.ratio},
                             {"N", c.stolen_count},
                             {"N_c", c.candidate_count},
                             {"k", c.k},
                             {"repetitions", c.repetitions},
                             {"seed", c.seed},
                             {"mean_p_d", c.mean_p_d}});
        }
        summary["pooled"] = {{"cells", std::move(cells)},
                             {"null_small_p_fraction", result.pooled.null_small_p_fraction}};
    }
    {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& c : result.multi.cells) {
            cells.push_back({{"method", c.method},
                             {"N", c.stolen_count},
                             {"A", c.target_psnr},
                             {"seed", c.seed},
                             {"mean_p_d", c.mean_p_d}});
        }
        summary["multi_forgeries"] = std::move(cells);
    }
    if (cfg.run_l_sweep) {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& c : result.l_sweep.cells) {
            cells.push_back({{"l", c.block_side},
                             {"seed", c.seed},
                             {"p_d", c.p_d},
                             {"p_fa", c.p_fa},
                             {"max_statistic", c.max_statistic}});
        }
        summary["l_sweep"] = std::move(cells);
    }

    auto f = open_report(out_dir, "summary.json");
    f << summary.dump(2) << "\n";
}

} // namespace prnu
