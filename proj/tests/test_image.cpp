#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include <zlib.h>

#include "prnu/error.hpp"
#include "prnu/image.hpp"
#include "prnu/image_io.hpp"
#include "prnu/rng.hpp"

using namespace prnu;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "prnu_test_image";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void push_u32be(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
    out.push_back(static_cast<unsigned char>(v & 0xFF));
}

void push_chunk(std::vector<unsigned char>& out, const char type[4],
                const std::vector<unsigned char>& payload) {
    push_u32be(out, static_cast<std::uint32_t>(payload.size()));
    std::size_t type_pos = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    uLong crc = crc32(0L, &out[type_pos], static_cast<uInt>(4 + payload.size()));
    push_u32be(out, static_cast<std::uint32_t>(crc));
}

// Minimal PNG writer for test fixtures; scanlines are filter-0 unless a raw
// pre-filtered buffer is supplied.
std::vector<unsigned char> make_png(int w, int h, int channels,
                                    const std::vector<unsigned char>& pixels,
                                    const std::vector<unsigned char>* prefiltered = nullptr) {
    std::vector<unsigned char> raw;
    if (prefiltered != nullptr) {
        raw = *prefiltered;
    } else {
        std::size_t stride = static_cast<std::size_t>(w) * channels;
        for (int y = 0; y < h; ++y) {
            raw.push_back(0);
            raw.insert(raw.end(), pixels.begin() + static_cast<std::ptrdiff_t>(y * stride),
                       pixels.begin() + static_cast<std::ptrdiff_t>((y + 1) * stride));
        }
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> compressed(bound);
    REQUIRE(compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) ==
            Z_OK);
    compressed.resize(bound);

    std::vector<unsigned char> out = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    std::vector<unsigned char> ihdr;
    push_u32be(ihdr, static_cast<std::uint32_t>(w));
    push_u32be(ihdr, static_cast<std::uint32_t>(h));
    ihdr.push_back(8);
    ihdr.push_back(channels == 3 ? 2 : 0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    push_chunk(out, "IHDR", ihdr);
    push_chunk(out, "IDAT", compressed);
    push_chunk(out, "IEND", {});
    return out;
}

RasterF32 random_raster(int w, int h, Rng& rng, float scale = 100.0f) {
    RasterF32 r = make_raster(w, h);
    for (auto& v : r.samples) v = static_cast<float>(rng.next_gaussian()) * scale;
    return r;
}

} // namespace

TEST_CASE("PGM P5 load maps bytes directly") {
    auto path = temp_file("tiny.pgm");
    write_bytes(path, {'P', '5', '\n', '2', ' ', '2', '\n', '2', '5', '5', '\n', 0, 255, 128, 64});
    ImagePlane p = load_image(path.string());
    CHECK(p.width == 2);
    CHECK(p.height == 2);
    CHECK(p.at(0, 0) == 0.0f);
    CHECK(p.at(1, 0) == 255.0f);
    CHECK(p.at(0, 1) == 128.0f);
    CHECK(p.at(1, 1) == 64.0f);
}

TEST_CASE("PGM with comments and multiple whitespace parses") {
    auto path = temp_file("comment.pgm");
    std::string header = "P5\n# a comment\n 3\t1 #x\n255\n";
    std::vector<unsigned char> bytes(header.begin(), header.end());
    bytes.insert(bytes.end(), {9, 8, 7});
    write_bytes(path, bytes);
    ImagePlane p = load_image(path.string());
    CHECK(p.width == 3);
    CHECK(p.height == 1);
    CHECK(p.at(2, 0) == 7.0f);
}

TEST_CASE("truncated PGM header is an unreadable-file error") {
    auto path = temp_file("trunc.pgm");
    write_bytes(path, {'P', '5', '\n', '2', ' '});
    CHECK_THROWS_WITH_AS(load_image(path.string()), doctest::Contains("unreadable file"), DataError);
}

TEST_CASE("truncated PGM payload is an unreadable-file error") {
    auto path = temp_file("short.pgm");
    write_bytes(path, {'P', '5', '\n', '2', ' ', '2', '\n', '2', '5', '5', '\n', 1, 2});
    CHECK_THROWS_WITH_AS(load_image(path.string()), doctest::Contains("unreadable file"), DataError);
}

TEST_CASE("16-bit PGM is rejected as unsupported depth") {
    auto path = temp_file("deep.pgm");
    std::string data = "P5\n1 1\n65535\n";
    std::vector<unsigned char> bytes(data.begin(), data.end());
    bytes.insert(bytes.end(), {0, 0});
    write_bytes(path, bytes);
    CHECK_THROWS_WITH_AS(load_image(path.string()), doctest::Contains("unsupported bit depth"),
                         DataError);
}

TEST_CASE("24-bit PNG reduces to BT.601 luma") {
    auto path = temp_file("rgb.png");
    // Single red pixel: round(0.299 * 255) = 76.
    write_bytes(path, make_png(1, 1, 3, {255, 0, 0}));
    ImagePlane p = load_image(path.string());
    CHECK(p.at(0, 0) == 76.0f);

    auto path2 = temp_file("rgb2.png");
    write_bytes(path2, make_png(2, 1, 3, {0, 255, 0, 10, 20, 30}));
    ImagePlane q = load_image(path2.string());
    CHECK(q.at(0, 0) == 150.0f); // round(0.587 * 255) = 149.685 -> 150
    CHECK(q.at(1, 0) == 18.0f);  // round(2.99 + 11.74 + 3.42) = round(18.15)
}

TEST_CASE("8-bit gray PNG loads directly, including filtered rows") {
    auto path = temp_file("gray.png");
    write_bytes(path, make_png(2, 2, 1, {1, 2, 3, 4}));
    ImagePlane p = load_image(path.string());
    CHECK(p.at(0, 0) == 1.0f);
    CHECK(p.at(1, 1) == 4.0f);

    // Row 0 sub-filtered, row 1 up-filtered.
    std::vector<unsigned char> raw = {1, 10, 5, 2, 1, 1};
    auto path2 = temp_file("filtered.png");
    write_bytes(path2, make_png(2, 2, 1, {}, &raw));
    ImagePlane q = load_image(path2.string());
    CHECK(q.at(0, 0) == 10.0f);
    CHECK(q.at(1, 0) == 15.0f);
    CHECK(q.at(0, 1) == 11.0f);
    CHECK(q.at(1, 1) == 16.0f);
}

TEST_CASE("corrupt PNG CRC is an unreadable-file error") {
    auto bytes = make_png(1, 1, 1, {42});
    bytes[bytes.size() - 5] ^= 0xFF; // damage IEND CRC
    auto path = temp_file("badcrc.png");
    write_bytes(path, bytes);
    CHECK_THROWS_AS(load_image(path.string()), DataError);
}

TEST_CASE("psnr matches hand-computed values") {
    ImagePlane a = make_plane(1, 2);
    a.samples = {0.0f, 0.0f};
    ImagePlane b = make_plane(1, 2);
    b.samples = {3.0f, 4.0f};
    // MSE 12.5 -> 10*log10(255^2/12.5)
    CHECK(std::abs(psnr(a, b) - 37.162) < 1e-2);

    ImagePlane c = make_plane(4, 4, 10.0f);
    ImagePlane d = make_plane(4, 4, 11.0f);
    CHECK(std::abs(psnr(c, d) - 48.1308) < 1e-3);

    CHECK(std::isinf(psnr(c, c)));
}

TEST_CASE("psnr is symmetric and non-negative") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        ImagePlane a = make_plane(9, 7);
        ImagePlane b = make_plane(9, 7);
        for (auto& v : a.samples) v = static_cast<float>(rng.next_below(256));
        for (auto& v : b.samples) v = static_cast<float>(rng.next_below(256));
        double ab = psnr(a, b);
        CHECK(ab == psnr(b, a));
        CHECK(ab >= 0.0);
    }
}

TEST_CASE("psnr rejects dimension mismatch") {
    CHECK_THROWS_AS(psnr(make_plane(2, 2), make_plane(2, 3)), DataError);
}

TEST_CASE("round_truncate clamps and rounds ties away from zero") {
    RasterF32 r = make_raster(5, 1);
    r.samples = {-3.2f, 254.5f, 127.49f, 300.0f, 0.5f};
    ImagePlane p = round_truncate(r);
    CHECK(p.samples[0] == 0.0f);
    CHECK(p.samples[1] == 255.0f);
    CHECK(p.samples[2] == 127.0f);
    CHECK(p.samples[3] == 255.0f);
    CHECK(p.samples[4] == 1.0f);
}

TEST_CASE("round_truncate is idempotent") {
    Rng rng(5);
    RasterF32 r = random_raster(16, 16, rng, 200.0f);
    ImagePlane once = round_truncate(r);
    ImagePlane twice = round_truncate(to_raster(once));
    CHECK(once.samples == twice.samples);
}

TEST_CASE("round_truncate rejects non-finite samples") {
    RasterF32 r = make_raster(1, 1);
    r.samples[0] = std::numeric_limits<float>::quiet_NaN();
    CHECK_THROWS_AS(round_truncate(r), DataError);
}

TEST_CASE("block grid covers 1024x1024 with exactly 1024 interior blocks") {
    BlockGrid grid = make_block_grid(1024, 1024, 32);
    CHECK(grid.blocks.size() == 1024);
    for (const auto& b : grid.blocks) {
        CHECK(b.w == 32);
        CHECK(b.h == 32);
    }
}

TEST_CASE("block grid partitions planes that l does not divide") {
    Rng rng(17);
    for (int trial = 0; trial < 8; ++trial) {
        int w = 1 + static_cast<int>(rng.next_below(100));
        int h = 1 + static_cast<int>(rng.next_below(60));
        int l = 1 + static_cast<int>(rng.next_below(40));
        BlockGrid grid = make_block_grid(w, h, l);
        std::vector<int> cover(static_cast<std::size_t>(w) * h, 0);
        for (const auto& b : grid.blocks) {
            CHECK(b.w >= 1);
            CHECK(b.h >= 1);
            CHECK(b.w <= l);
            CHECK(b.h <= l);
            for (int y = b.y; y < b.y + b.h; ++y) {
                for (int x = b.x; x < b.x + b.w; ++x) {
                    cover[static_cast<std::size_t>(y) * w + x] += 1;
                }
            }
        }
        for (int c : cover) CHECK(c == 1);
    }
}

TEST_CASE("raster serialization round-trips bit-exactly") {
    Rng rng(23);
    auto path = temp_file("round.prnu");
    for (int trial = 0; trial < 4; ++trial) {
        RasterF32 r = random_raster(7 + trial, 5, rng, 1e-3f);
        save_raster(r, path.string());
        RasterF32 back = load_raster(path.string());
        CHECK(back.width == r.width);
        CHECK(back.height == r.height);
        CHECK(std::memcmp(back.samples.data(), r.samples.data(), 4 * r.samples.size()) == 0);
    }
}

TEST_CASE("raster file layout is 16-byte header plus packed floats") {
    auto path = temp_file("layout.prnu");
    save_raster(make_raster(3, 2, 1.5f), path.string());
    CHECK(std::filesystem::file_size(path) == 16 + 24);
    std::ifstream f(path, std::ios::binary);
    char magic[4];
    f.read(magic, 4);
    CHECK(std::memcmp(magic, "PRNU", 4) == 0);
}

TEST_CASE("raster loader rejects bad magic and size mismatch") {
    auto path = temp_file("badmagic.prnu");
    write_bytes(path, {'X', 'X', 'X', 'X', 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK_THROWS_WITH_AS(load_raster(path.string()), doctest::Contains("bad magic"), DataError);

    auto path2 = temp_file("shortpayload.prnu");
    write_bytes(path2, {'P', 'R', 'N', 'U', 2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK_THROWS_WITH_AS(load_raster(path2.string()), doctest::Contains("size mismatch"), DataError);
}

TEST_CASE("save_pgm round-trips through load_image") {
    ImagePlane p = make_plane(3, 2);
    p.samples = {0, 1, 2, 253, 254, 255};
    auto path = temp_file("roundtrip.pgm");
    save_pgm(p, path.string());
    ImagePlane back = load_image(path.string());
    CHECK(back.samples == p.samples);
}

TEST_CASE("zero-area and unknown formats are rejected") {
    auto path = temp_file("zero.pgm");
    write_bytes(path, {'P', '5', '\n', '0', ' ', '2', '\n', '2', '5', '5', '\n'});
    CHECK_THROWS_WITH_AS(load_image(path.string()), doctest::Contains("zero-area"), DataError);

    auto path2 = temp_file("garbage.bin");
    write_bytes(path2, {1, 2, 3, 4});
    CHECK_THROWS_WITH_AS(load_image(path2.string()), doctest::Contains("unreadable file"), DataError);
}
