#pragma once

#include <string>

#include "prnu/image.hpp"

namespace prnu {

/// Loads an 8-bit grayscale PGM (P5) or an 8-bit gray / 24-bit RGB PNG.
/// Color input is reduced to one luma plane with BT.601 weights
/// 0.299/0.587/0.114 (rounded to nearest integer).
ImagePlane load_image(const std::string& path);

/// Writes an ImagePlane as binary PGM (P5, maxval 255).
void save_pgm(const ImagePlane& plane, const std::string& path);

/// "PRNU" raster container: 16-byte header (magic "PRNU", u32 LE width,
/// u32 LE height, u32 reserved=0) followed by row-major little-endian f32.
void save_raster(const RasterF32& x, const std::string& path);
RasterF32 load_raster(const std::string& path);

} // namespace prnu
