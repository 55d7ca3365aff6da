#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace prnu {

/// Quantized luma raster. Samples are stored as float for arithmetic
/// convenience, but any plane produced by a rounding/truncation step holds
/// integers in [0, 255].
struct ImagePlane {
    int width = 0;
    int height = 0;
    std::vector<float> samples; // row-major

    float at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
    float& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Unbounded real-valued raster; carrier for residuals and fingerprints.
struct RasterF32 {
    int width = 0;
    int height = 0;
    std::vector<float> samples; // row-major

    float at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
    float& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

ImagePlane make_plane(int width, int height, float fill = 0.0f);
RasterF32 make_raster(int width, int height, float fill = 0.0f);

/// Throws DataError unless dimensions are positive and the sample count matches.
void validate_dims(int width, int height, std::size_t sample_count);

RasterF32 to_raster(const ImagePlane& plane);

struct BlockRect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

/// Non-overlapping cover of a plane by l-by-l blocks; right/bottom edge blocks
/// shrink when l does not divide the plane.
struct BlockGrid {
    int block_side = 0;
    int plane_width = 0;
    int plane_height = 0;
    std::vector<BlockRect> blocks;
};

BlockGrid make_block_grid(int width, int height, int block_side);

ImagePlane extract_block(const ImagePlane& plane, const BlockRect& rect);
RasterF32 extract_block(const RasterF32& raster, const BlockRect& rect);
void insert_block(ImagePlane& plane, const BlockRect& rect, const ImagePlane& block);

/// 10*log10(255^2 / MSE); +infinity when the planes are identical.
double psnr(const ImagePlane& a, const ImagePlane& b);

/// Nearest integer (ties away from zero) clamped to [0, 255].
float round_truncate_sample(double v);
ImagePlane round_truncate(const RasterF32& x);

} // namespace prnu
