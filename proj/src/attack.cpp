#include "prnu/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "prnu/error.hpp"
#include "prnu/parallel.hpp"
#include "prnu/rng.hpp"

namespace prnu {

void AttackParams::validate(int stolen_count) const {
    if (subset_size < 1) throw ConfigError("attack: subset size r must be >= 1");
    if (subset_size > stolen_count) {
        throw ConfigError("attack: subset size r exceeds stolen image count N");
    }
    if (block_side < 8) throw ConfigError("attack: block side l < 8");
    if (!(target_psnr >= 40.0 && target_psnr <= 60.0)) {
        throw ConfigError("attack: target PSNR outside accepted band [40, 60] dB");
    }
    if (!(predenoise_sigma > 0.0)) throw ConfigError("attack: predenoise sigma must be > 0");
}

std::vector<std::string> attack_param_warnings(const AttackParams& params) {
    std::vector<std::string> warnings;
    if (params.target_psnr < 47.6 || params.target_psnr > 58.7) {
        warnings.push_back("target PSNR " + std::to_string(params.target_psnr) +
                           " dB is outside the natural-forgery band [47.6, 58.7] dB");
    }
    return warnings;
}

ImagePlane superimpose(const ImagePlane& j, const RasterF32& k, double alpha) {
    if (j.width != k.width || j.height != k.height) {
        throw DataError("superimpose: dimension mismatch");
    }
    if (alpha < 0.0) throw ConfigError("superimpose: negative alpha");
    RasterF32 scaled = make_raster(j.width, j.height);
    for (std::size_t i = 0; i < scaled.samples.size(); ++i) {
        scaled.samples[i] = static_cast<float>(
            j.samples[i] * (1.0 + alpha * static_cast<double>(k.samples[i])));
    }
    return round_truncate(scaled);
}

ImagePlane superimpose(const ImagePlane& j, const Fingerprint& k, double alpha) {
    return superimpose(j, k.raster, alpha);
}

StrengthSearch find_strength(const ImagePlane& block, const RasterF32& fingerprint_block,
                             double target_db) {
    if (block.width != fingerprint_block.width || block.height != fingerprint_block.height) {
        throw DataError("find_strength: dimension mismatch");
    }

    StrengthSearch best;
    double best_err = std::numeric_limits<double>::infinity();
    int probes = 0;

    auto probe = [&](double alpha) {
        ImagePlane forged = superimpose(block, fingerprint_block, alpha);
        double p = psnr(forged, block);
        ++probes;
        if (std::isfinite(p)) {
            double err = std::abs(p - target_db);
            if (err < best_err) {
                best_err = err;
                best.alpha = alpha;
                best.psnr_db = p;
            }
        }
        return p;
    };

    // Doubling phase: at most 20 probe points 0.05 * 2^0 .. 0.05 * 2^19, so the
    // whole search stays within 60 probes.
    double lo = 0.0;
    double hi = 0.05;
    double p = probe(hi);
    int doublings = 1;
    while (p >= target_db && doublings < 20) {
        lo = hi;
        hi *= 2.0;
        p = probe(hi);
        ++doublings;
    }

    if (p >= target_db) {
        // Never bracketed the target. The block may still have produced finite
        // probes (quantization plateau above the target).
        if (best_err == std::numeric_limits<double>::infinity()) {
            throw UnreachableTarget("unreachable target: PSNR stayed infinite for all strengths");
        }
        best.probes = probes;
        return best;
    }

    for (int step = 0; step < 40; ++step) {
        double mid = 0.5 * (lo + hi);
        double pm = probe(mid);
        if (pm >= target_db) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    best.probes = probes;
    return best;
}

namespace {

ImagePlane predenoise_target(const ImagePlane& target, const AttackParams& params,
                             const DenoiseParams& p) {
    DenoiseParams pre = p;
    pre.sigma = params.predenoise_sigma;
    return round_truncate(denoise(to_raster(target), pre));
}

} // namespace

ForgeryRecord block_attack_with_residuals(const ImagePlane& target,
                                          std::span<const ImagePlane> stolen,
                                          std::span<const RasterF32> residuals,
                                          const AttackParams& params, const DenoiseParams& p) {
    params.validate(static_cast<int>(stolen.size()));
    if (stolen.size() != residuals.size()) {
        throw DataError("block_attack: stolen/residual count mismatch");
    }
    for (const auto& img : stolen) {
        if (img.width != target.width || img.height != target.height) {
            throw DataError("block_attack: stolen image dimension mismatch");
        }
    }

    ImagePlane base = predenoise_target(target, params, p);
    BlockGrid grid = make_block_grid(target.width, target.height, params.block_side);

    struct BlockOutcome {
        BlockForgery info;
        ImagePlane forged;
    };
    std::vector<BlockOutcome> outcomes(grid.blocks.size());

    parallel_for(static_cast<int>(grid.blocks.size()), [&](int b) {
        const BlockRect& rect = grid.blocks[static_cast<std::size_t>(b)];
        Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(b)));
        std::vector<int> subset = sample_without_replacement(static_cast<int>(stolen.size()),
                                                             params.subset_size, rng);

        std::vector<ImagePlane> image_blocks;
        std::vector<RasterF32> residual_blocks;
        image_blocks.reserve(subset.size());
        residual_blocks.reserve(subset.size());
        for (int idx : subset) {
            image_blocks.push_back(extract_block(stolen[static_cast<std::size_t>(idx)], rect));
            residual_blocks.push_back(extract_block(residuals[static_cast<std::size_t>(idx)], rect));
        }
        Fingerprint kb = estimate_fingerprint_from_residuals(image_blocks, residual_blocks);

        ImagePlane block = extract_block(base, rect);
        BlockOutcome& out = outcomes[static_cast<std::size_t>(b)];
        out.info.rect = rect;
        out.info.subset = std::move(subset);
        try {
            StrengthSearch found = find_strength(block, kb.raster, params.target_psnr);
            if (std::abs(found.psnr_db - params.target_psnr) <= kBlockPsnrTolerance) {
                out.info.alpha = found.alpha;
                out.info.psnr_db = found.psnr_db;
                out.forged = superimpose(block, kb.raster, found.alpha);
                return;
            }
        } catch (const UnreachableTarget&) {
        }
        // Target not reachable within tolerance: leave the block untouched.
        out.info.alpha = 0.0;
        out.info.psnr_db = std::numeric_limits<double>::infinity();
        out.info.flagged = true;
        out.forged = block;
    });

    ForgeryRecord record;
    record.params = params;
    record.forged = base;
    record.blocks.reserve(outcomes.size());
    for (auto& out : outcomes) {
        insert_block(record.forged, out.info.rect, out.forged);
        record.blocks.push_back(std::move(out.info));
    }
    record.overall_psnr = psnr(record.forged, base);
    return record;
}

ForgeryRecord block_attack(const ImagePlane& target, std::span<const ImagePlane> stolen,
                           const AttackParams& params, const DenoiseParams& p) {
    std::vector<RasterF32> residuals;
    residuals.reserve(stolen.size());
    for (const auto& img : stolen) residuals.push_back(residual(img, p));
    return block_attack_with_residuals(target, stolen, residuals, params, p);
}

ForgeryRecord conventional_attack_with_residuals(const ImagePlane& target,
                                                 std::span<const ImagePlane> stolen,
                                                 std::span<const RasterF32> residuals,
                                                 double target_psnr, const DenoiseParams& p,
                                                 double predenoise_sigma) {
    AttackParams params;
    params.block_side = std::max({target.width, target.height, 8});
    params.subset_size = static_cast<int>(stolen.size());
    params.target_psnr = target_psnr;
    params.seed = 0;
    params.predenoise_sigma = predenoise_sigma;
    return block_attack_with_residuals(target, stolen, residuals, params, p);
}

ForgeryRecord conventional_attack(const ImagePlane& target, std::span<const ImagePlane> stolen,
                                  double target_psnr, const DenoiseParams& p,
                                  double predenoise_sigma) {
    std::vector<RasterF32> residuals;
    residuals.reserve(stolen.size());
    for (const auto& img : stolen) residuals.push_back(residual(img, p));
    return conventional_attack_with_residuals(target, stolen, residuals, target_psnr, p,
                                              predenoise_sigma);
}

void save_forgery_sidecar(const ForgeryRecord& record, const std::string& path) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["seed"] = record.params.seed;
    j["l"] = record.params.block_side;
    j["r"] = record.params.subset_size;
    j["A"] = record.params.target_psnr;
    j["predenoise_sigma"] = record.params.predenoise_sigma;
    j["overall_psnr"] =
        std::isfinite(record.overall_psnr) ? nlohmann::json(record.overall_psnr) : nlohmann::json();
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : record.blocks) {
        nlohmann::json jb;
        jb["x"] = b.rect.x;
        jb["y"] = b.rect.y;
        jb["w"] = b.rect.w;
        jb["h"] = b.rect.h;
        jb["alpha"] = b.alpha;
        jb["psnr"] = std::isfinite(b.psnr_db) ? nlohmann::json(b.psnr_db) : nlohmann::json();
        jb["flagged"] = b.flagged;
        jb["subset"] = b.subset;
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

} // namespace prnu
