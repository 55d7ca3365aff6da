#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prnu/denoise.hpp"
#include "prnu/fingerprint.hpp"
#include "prnu/image.hpp"

namespace prnu {

struct AttackParams {
    int block_side = 32;       // l
    int subset_size = 10;      // r, images drawn per block
    double target_psnr = 50.0; // A, decibels
    std::uint64_t seed = 0;
    double predenoise_sigma = 1.0;

    /// Throws ConfigError on hard violations (r < 1, l < 8, A outside [40, 60]).
    void validate(int stolen_count) const;
};

/// Advisory messages for values that are legal but outside the quality band
/// reported for natural-strength forgeries.
std::vector<std::string> attack_param_warnings(const AttackParams& params);

struct BlockForgery {
    BlockRect rect;
    double alpha = 0.0;
    double psnr_db = 0.0;          // achieved, against the pre-denoised block
    bool flagged = false;          // true when the target PSNR was unreachable
    std::vector<int> subset;       // stolen-image indices, ascending
};

struct ForgeryRecord {
    ImagePlane forged;
    std::vector<BlockForgery> blocks;
    double overall_psnr = 0.0; // against the pre-denoised target
    AttackParams params;
};

/// round_truncate(J * (1 + alpha*K)) element-wise.
ImagePlane superimpose(const ImagePlane& j, const RasterF32& k, double alpha);
ImagePlane superimpose(const ImagePlane& j, const Fingerprint& k, double alpha);

struct StrengthSearch {
    double alpha = 0.0;
    double psnr_db = 0.0;
    int probes = 0;
};

/// Finds the strength whose achieved PSNR is closest to target_db: the probe
/// strength doubles from 0.05 until PSNR drops below the target (at most 20
/// doublings), then 40 bisection steps. Throws UnreachableTarget when every
/// probe leaves the block unchanged.
StrengthSearch find_strength(const ImagePlane& block, const RasterF32& fingerprint_block,
                             double target_db);

/// Blocks whose achieved PSNR misses the target by more than this are flagged
/// and emitted unmodified.
inline constexpr double kBlockPsnrTolerance = 0.2;

/// Block-wise randomized fingerprint-copy attack. The target is first lightly
/// denoised (params.predenoise_sigma); each block then receives a fingerprint
/// estimated from params.subset_size stolen images drawn without replacement
/// by an RNG seeded from (params.seed, block index).
ForgeryRecord block_attack(const ImagePlane& target, std::span<const ImagePlane> stolen,
                           const AttackParams& params, const DenoiseParams& p);

/// As block_attack but with stolen-image residuals already extracted
/// (residuals[i] must correspond to stolen[i] under the same DenoiseParams).
ForgeryRecord block_attack_with_residuals(const ImagePlane& target,
                                          std::span<const ImagePlane> stolen,
                                          std::span<const RasterF32> residuals,
                                          const AttackParams& params, const DenoiseParams& p);

/// Whole-image attack: one block covering the plane, fingerprint estimated
/// from all stolen images, one global strength targeting A.
ForgeryRecord conventional_attack(const ImagePlane& target, std::span<const ImagePlane> stolen,
                                  double target_psnr, const DenoiseParams& p,
                                  double predenoise_sigma = 1.0);

ForgeryRecord conventional_attack_with_residuals(const ImagePlane& target,
                                                 std::span<const ImagePlane> stolen,
                                                 std::span<const RasterF32> residuals,
                                                 double target_psnr, const DenoiseParams& p,
                                                 double predenoise_sigma = 1.0);

/// JSON sidecar for a forged image (seed, l, r, A, per-block alpha/PSNR/subset).
void save_forgery_sidecar(const ForgeryRecord& record, const std::string& path);

} // namespace prnu
