#include "prnu/image_io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include <zlib.h>

#include "prnu/error.hpp"

namespace prnu {

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("unreadable file: " + path);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    if (!f.good() && !f.eof()) throw DataError("unreadable file: " + path);
    return data;
}

void write_file(const std::string& path, const std::uint8_t* data, std::size_t size) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!f) throw DataError("write failed: " + path);
}

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFFu));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFFu));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFFu));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFFu));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t get_u32be(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

// ---- PGM (P5) ----

struct PgmCursor {
    const std::vector<std::uint8_t>& data;
    std::size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < data.size()) {
            if (std::isspace(data[pos])) {
                ++pos;
            } else if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    int read_int(const std::string& path) {
        skip_space_and_comments();
        if (pos >= data.size() || !std::isdigit(data[pos])) {
            throw DataError("unreadable file (truncated PGM header): " + path);
        }
        long v = 0;
        while (pos < data.size() && std::isdigit(data[pos])) {
            v = v * 10 + (data[pos] - '0');
            if (v > std::numeric_limits<int>::max()) {
                throw DataError("unreadable file (PGM header overflow): " + path);
            }
            ++pos;
        }
        return static_cast<int>(v);
    }
};

ImagePlane load_pgm(const std::vector<std::uint8_t>& data, const std::string& path) {
    PgmCursor cur{data};
    cur.pos = 2; // past "P5"
    int width = cur.read_int(path);
    int height = cur.read_int(path);
    int maxval = cur.read_int(path);
    if (width <= 0 || height <= 0) throw DataError("zero-area image: " + path);
    if (maxval <= 0 || maxval > 255) throw DataError("unsupported bit depth (PGM maxval " +
                                                     std::to_string(maxval) + "): " + path);
    if (cur.pos >= data.size() || !std::isspace(data[cur.pos])) {
        throw DataError("unreadable file (truncated PGM header): " + path);
    }
    ++cur.pos; // single whitespace after maxval
    std::size_t need = static_cast<std::size_t>(width) * height;
    if (data.size() - cur.pos < need) throw DataError("unreadable file (truncated PGM data): " + path);
    ImagePlane plane = make_plane(width, height);
    for (std::size_t i = 0; i < need; ++i) {
        plane.samples[i] = static_cast<float>(data[cur.pos + i]);
    }
    return plane;
}

// ---- PNG ----

int paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a);
    int pb = std::abs(p - b);
    int pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

float luma_from_rgb(int r, int g, int b) {
    return round_truncate_sample(0.299 * r + 0.587 * g + 0.114 * b);
}

ImagePlane load_png(const std::vector<std::uint8_t>& data, const std::string& path) {
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (data.size() < 8 || std::memcmp(data.data(), sig, 8) != 0) {
        throw DataError("unreadable file (bad PNG signature): " + path);
    }
    std::size_t pos = 8;
    int width = 0;
    int height = 0;
    int bit_depth = 0;
    int color_type = -1;
    bool have_ihdr = false;
    std::vector<std::uint8_t> idat;

    while (true) {
        if (data.size() - pos < 12) throw DataError("unreadable file (truncated PNG): " + path);
        std::uint32_t len = get_u32be(&data[pos]);
        if (len > data.size() - pos - 12) {
            throw DataError("unreadable file (truncated PNG chunk): " + path);
        }
        const std::uint8_t* type = &data[pos + 4];
        const std::uint8_t* payload = &data[pos + 8];
        std::uint32_t file_crc = get_u32be(payload + len);
        uLong crc = crc32(0L, type, 4);
        crc = crc32(crc, payload, len);
        if (static_cast<std::uint32_t>(crc) != file_crc) {
            throw DataError("unreadable file (PNG CRC mismatch): " + path);
        }
        std::string t(reinterpret_cast<const char*>(type), 4);
        if (t == "IHDR") {
            if (len != 13) throw DataError("unreadable file (bad IHDR): " + path);
            width = static_cast<int>(get_u32be(payload));
            height = static_cast<int>(get_u32be(payload + 4));
            bit_depth = payload[8];
            color_type = payload[9];
            if (payload[10] != 0 || payload[11] != 0) {
                throw DataError("unreadable file (unsupported PNG compression/filter): " + path);
            }
            if (payload[12] != 0) {
                throw DataError("unsupported bit depth (interlaced PNG): " + path);
            }
            if (width <= 0 || height <= 0) throw DataError("zero-area image: " + path);
            if (bit_depth != 8 || (color_type != 0 && color_type != 2)) {
                throw DataError("unsupported bit depth (PNG depth " + std::to_string(bit_depth) +
                                ", color type " + std::to_string(color_type) + "): " + path);
            }
            have_ihdr = true;
        } else if (t == "IDAT") {
            idat.insert(idat.end(), payload, payload + len);
        } else if (t == "IEND") {
            break;
        }
        pos += 12 + len;
    }
    if (!have_ihdr || idat.empty()) throw DataError("unreadable file (incomplete PNG): " + path);

    int channels = (color_type == 2) ? 3 : 1;
    std::size_t stride = static_cast<std::size_t>(width) * channels;
    std::size_t raw_size = (stride + 1) * static_cast<std::size_t>(height);
    std::vector<std::uint8_t> raw(raw_size);
    uLongf dest_len = raw_size;
    int zrc = uncompress(raw.data(), &dest_len, idat.data(), idat.size());
    if (zrc != Z_OK || dest_len != raw_size) {
        throw DataError("unreadable file (PNG inflate failed): " + path);
    }

    std::vector<std::uint8_t> pixels(stride * height);
    for (int y = 0; y < height; ++y) {
        const std::uint8_t* src = &raw[static_cast<std::size_t>(y) * (stride + 1)];
        std::uint8_t filter = src[0];
        std::uint8_t* dst = &pixels[static_cast<std::size_t>(y) * stride];
        const std::uint8_t* prev =
            (y > 0) ? &pixels[static_cast<std::size_t>(y - 1) * stride] : nullptr;
        for (std::size_t i = 0; i < stride; ++i) {
            int x = src[1 + i];
            int a = (i >= static_cast<std::size_t>(channels)) ? dst[i - channels] : 0;
            int b = prev ? prev[i] : 0;
            int c = (prev && i >= static_cast<std::size_t>(channels)) ? prev[i - channels] : 0;
            int v = 0;
            switch (filter) {
                case 0: v = x; break;
                case 1: v = x + a; break;
                case 2: v = x + b; break;
                case 3: v = x + (a + b) / 2; break;
                case 4: v = x + paeth(a, b, c); break;
                default: throw DataError("unreadable file (bad PNG filter): " + path);
            }
            dst[i] = static_cast<std::uint8_t>(v & 0xFF);
        }
    }

    ImagePlane plane = make_plane(width, height);
    if (channels == 1) {
        for (std::size_t i = 0; i < plane.samples.size(); ++i) {
            plane.samples[i] = static_cast<float>(pixels[i]);
        }
    } else {
        for (std::size_t i = 0; i < plane.samples.size(); ++i) {
            plane.samples[i] = luma_from_rgb(pixels[3 * i], pixels[3 * i + 1], pixels[3 * i + 2]);
        }
    }
    return plane;
}

} // namespace

ImagePlane load_image(const std::string& path) {
    auto data = read_file(path);
    if (data.size() >= 2 && data[0] == 'P' && data[1] == '5') return load_pgm(data, path);
    if (data.size() >= 8 && data[0] == 0x89 && data[1] == 'P') return load_png(data, path);
    throw DataError("unreadable file (unknown format): " + path);
}

void save_pgm(const ImagePlane& plane, const std::string& path) {
    validate_dims(plane.width, plane.height, plane.samples.size());
    std::string header =
        "P5\n" + std::to_string(plane.width) + " " + std::to_string(plane.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + plane.samples.size());
    for (float s : plane.samples) {
        if (s < 0.0f || s > 255.0f || s != std::floor(s)) {
            throw DataError("save_pgm: sample not an integer in [0,255]");
        }
        out.push_back(static_cast<std::uint8_t>(s));
    }
    write_file(path, out.data(), out.size());
}

void save_raster(const RasterF32& x, const std::string& path) {
    validate_dims(x.width, x.height, x.samples.size());
    std::vector<std::uint8_t> out;
    out.reserve(16 + 4 * x.samples.size());
    out.insert(out.end(), {'P', 'R', 'N', 'U'});
    put_u32le(out, static_cast<std::uint32_t>(x.width));
    put_u32le(out, static_cast<std::uint32_t>(x.height));
    put_u32le(out, 0u);
    for (float s : x.samples) {
        if (!std::isfinite(s)) throw DataError("save_raster: non-finite sample");
        put_u32le(out, std::bit_cast<std::uint32_t>(s));
    }
    write_file(path, out.data(), out.size());
}

RasterF32 load_raster(const std::string& path) {
    auto data = read_file(path);
    if (data.size() < 16 || std::memcmp(data.data(), "PRNU", 4) != 0) {
        throw DataError("bad magic in raster file: " + path);
    }
    std::uint32_t width = get_u32le(&data[4]);
    std::uint32_t height = get_u32le(&data[8]);
    if (width == 0 || height == 0 || width > (1u << 20) || height > (1u << 20)) {
        throw DataError("bad raster dimensions: " + path);
    }
    std::size_t need = static_cast<std::size_t>(width) * height;
    if (data.size() != 16 + 4 * need) {
        throw DataError("size mismatch between header and payload: " + path);
    }
    RasterF32 r = make_raster(static_cast<int>(width), static_cast<int>(height));
    for (std::size_t i = 0; i < need; ++i) {
        r.samples[i] = std::bit_cast<float>(get_u32le(&data[16 + 4 * i]));
    }
    return r;
}

} // namespace prnu
