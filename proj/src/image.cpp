#include "prnu/image.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "prnu/error.hpp"

namespace prnu {

void validate_dims(int width, int height, std::size_t sample_count) {
    if (width <= 0 || height <= 0) {
        throw DataError("zero-area image: " + std::to_string(width) + "x" + std::to_string(height));
    }
    if (sample_count != static_cast<std::size_t>(width) * height) {
        throw DataError("sample count does not match dimensions");
    }
}

ImagePlane make_plane(int width, int height, float fill) {
    if (width <= 0 || height <= 0) throw DataError("zero-area image");
    ImagePlane p;
    p.width = width;
    p.height = height;
    p.samples.assign(static_cast<std::size_t>(width) * height, fill);
    return p;
}

RasterF32 make_raster(int width, int height, float fill) {
    if (width <= 0 || height <= 0) throw DataError("zero-area raster");
    RasterF32 r;
    r.width = width;
    r.height = height;
    r.samples.assign(static_cast<std::size_t>(width) * height, fill);
    return r;
}

RasterF32 to_raster(const ImagePlane& plane) {
    RasterF32 r;
    r.width = plane.width;
    r.height = plane.height;
    r.samples = plane.samples;
    return r;
}

BlockGrid make_block_grid(int width, int height, int block_side) {
    if (width <= 0 || height <= 0) throw DataError("zero-area plane");
    if (block_side <= 0) throw ConfigError("block side must be positive");
    BlockGrid grid;
    grid.block_side = block_side;
    grid.plane_width = width;
    grid.plane_height = height;
    for (int y = 0; y < height; y += block_side) {
        for (int x = 0; x < width; x += block_side) {
            BlockRect rect;
            rect.x = x;
            rect.y = y;
            rect.w = std::min(block_side, width - x);
            rect.h = std::min(block_side, height - y);
            grid.blocks.push_back(rect);
        }
    }
    return grid;
}

namespace {

template <typename T>
T extract_block_impl(const T& src, const BlockRect& rect) {
    if (rect.x < 0 || rect.y < 0 || rect.w <= 0 || rect.h <= 0 || rect.x + rect.w > src.width ||
        rect.y + rect.h > src.height) {
        throw DataError("block rectangle outside plane");
    }
    T out;
    out.width = rect.w;
    out.height = rect.h;
    out.samples.resize(static_cast<std::size_t>(rect.w) * rect.h);
    for (int y = 0; y < rect.h; ++y) {
        const float* row = &src.samples[static_cast<std::size_t>(rect.y + y) * src.width + rect.x];
        std::copy(row, row + rect.w, &out.samples[static_cast<std::size_t>(y) * rect.w]);
    }
    return out;
}

} // namespace

ImagePlane extract_block(const ImagePlane& plane, const BlockRect& rect) {
    return extract_block_impl(plane, rect);
}

RasterF32 extract_block(const RasterF32& raster, const BlockRect& rect) {
    return extract_block_impl(raster, rect);
}

void insert_block(ImagePlane& plane, const BlockRect& rect, const ImagePlane& block) {
    if (block.width != rect.w || block.height != rect.h) {
        throw DataError("block dimensions do not match rectangle");
    }
    if (rect.x < 0 || rect.y < 0 || rect.x + rect.w > plane.width || rect.y + rect.h > plane.height) {
        throw DataError("block rectangle outside plane");
    }
    for (int y = 0; y < rect.h; ++y) {
        const float* src = &block.samples[static_cast<std::size_t>(y) * rect.w];
        std::copy(src, src + rect.w,
                  &plane.samples[static_cast<std::size_t>(rect.y + y) * plane.width + rect.x]);
    }
}

double psnr(const ImagePlane& a, const ImagePlane& b) {
    if (a.width != b.width || a.height != b.height) {
        throw DataError("psnr: dimension mismatch");
    }
    validate_dims(a.width, a.height, a.samples.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        double d = static_cast<double>(a.samples[i]) - b.samples[i];
        sq += d * d;
    }
    if (sq == 0.0) return std::numeric_limits<double>::infinity();
    double mse = sq / static_cast<double>(a.samples.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

float round_truncate_sample(double v) {
    double r = std::round(v); // ties away from zero
    if (r < 0.0) return 0.0f;
    if (r > 255.0) return 255.0f;
    return static_cast<float>(r);
}

ImagePlane round_truncate(const RasterF32& x) {
    validate_dims(x.width, x.height, x.samples.size());
    ImagePlane out;
    out.width = x.width;
    out.height = x.height;
    out.samples.resize(x.samples.size());
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
        if (!std::isfinite(x.samples[i])) throw DataError("round_truncate: non-finite sample");
        out.samples[i] = round_truncate_sample(x.samples[i]);
    }
    return out;
}

} // namespace prnu
