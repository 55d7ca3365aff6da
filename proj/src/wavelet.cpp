#include "prnu/wavelet.hpp"

#include <array>
#include <string>

#include "prnu/error.hpp"

namespace prnu {

namespace {

// Orthonormal 8-tap Daubechies analysis pair; the highpass is the alternating
// flip of the lowpass, so the periodized transform is orthogonal and the
// synthesis below is its exact transpose.
constexpr std::array<double, 8> kLo = {
    -0.010597401784997278, 0.032883011666982945, 0.030841381835986965, -0.187034811718881140,
    -0.027983769416983849, 0.630880767929590400, 0.714846570552541500, 0.230377813308855230,
};

constexpr std::array<double, 8> make_hi() {
    std::array<double, 8> g{};
    for (int k = 0; k < 8; ++k) {
        g[static_cast<std::size_t>(k)] = (k % 2 == 0 ? 1.0 : -1.0) * kLo[static_cast<std::size_t>(7 - k)];
    }
    return g;
}

constexpr std::array<double, 8> kHi = make_hi();

inline int extended(int n) { return n + (n & 1); }

// Analyzes `signal` (length n, edge-replicated to even) into lo/hi halves.
void analyze_1d(const double* signal, int n, double* scratch, double* lo, double* hi) {
    int ne = extended(n);
    for (int i = 0; i < n; ++i) scratch[i] = signal[i];
    if (ne != n) scratch[n] = signal[n - 1];
    int half = ne / 2;
    for (int i = 0; i < half; ++i) {
        double sl = 0.0;
        double sh = 0.0;
        int base = 2 * i;
        if (base + 7 < ne) {
            for (int k = 0; k < 8; ++k) {
                double v = scratch[base + k];
                sl += kLo[static_cast<std::size_t>(k)] * v;
                sh += kHi[static_cast<std::size_t>(k)] * v;
            }
        } else {
            for (int k = 0; k < 8; ++k) {
                double v = scratch[(base + k) % ne];
                sl += kLo[static_cast<std::size_t>(k)] * v;
                sh += kHi[static_cast<std::size_t>(k)] * v;
            }
        }
        lo[i] = sl;
        hi[i] = sh;
    }
}

// Transpose of analyze_1d: reconstructs n samples from lo/hi of length ext(n)/2.
void synthesize_1d(const double* lo, const double* hi, int n, double* scratch, double* out) {
    int ne = extended(n);
    int half = ne / 2;
    for (int j = 0; j < ne; ++j) scratch[j] = 0.0;
    for (int i = 0; i < half; ++i) {
        int base = 2 * i;
        double a = lo[i];
        double d = hi[i];
        if (base + 7 < ne) {
            for (int k = 0; k < 8; ++k) {
                scratch[base + k] += a * kLo[static_cast<std::size_t>(k)] + d * kHi[static_cast<std::size_t>(k)];
            }
        } else {
            for (int k = 0; k < 8; ++k) {
                scratch[(base + k) % ne] += a * kLo[static_cast<std::size_t>(k)] + d * kHi[static_cast<std::size_t>(k)];
            }
        }
    }
    // For odd n the transpose reproduces the edge-replicated signal exactly,
    // so dropping the trailing sample is an exact inverse.
    for (int j = 0; j < n; ++j) out[j] = scratch[j];
}

struct LevelSplit {
    Matd ll, lh, hl, hh;
};

LevelSplit analyze_level(const Matd& x) {
    int w = x.width;
    int h = x.height;
    int mw = extended(w) / 2;
    int mh = extended(h) / 2;

    Matd low = make_matd(mw, h);
    Matd high = make_matd(mw, h);
    std::vector<double> scratch(static_cast<std::size_t>(extended(std::max(w, h))));
    std::vector<double> lo_buf(static_cast<std::size_t>(std::max(mw, mh)));
    std::vector<double> hi_buf(static_cast<std::size_t>(std::max(mw, mh)));

    for (int y = 0; y < h; ++y) {
        analyze_1d(&x.v[static_cast<std::size_t>(y) * w], w, scratch.data(), lo_buf.data(),
                   hi_buf.data());
        for (int i = 0; i < mw; ++i) {
            low.at(i, y) = lo_buf[static_cast<std::size_t>(i)];
            high.at(i, y) = hi_buf[static_cast<std::size_t>(i)];
        }
    }

    LevelSplit out;
    out.ll = make_matd(mw, mh);
    out.lh = make_matd(mw, mh);
    out.hl = make_matd(mw, mh);
    out.hh = make_matd(mw, mh);

    std::vector<double> column(static_cast<std::size_t>(h));
    for (int xcol = 0; xcol < mw; ++xcol) {
        for (int y = 0; y < h; ++y) column[static_cast<std::size_t>(y)] = low.at(xcol, y);
        analyze_1d(column.data(), h, scratch.data(), lo_buf.data(), hi_buf.data());
        for (int y = 0; y < mh; ++y) {
            out.ll.at(xcol, y) = lo_buf[static_cast<std::size_t>(y)];
            out.lh.at(xcol, y) = hi_buf[static_cast<std::size_t>(y)];
        }
        for (int y = 0; y < h; ++y) column[static_cast<std::size_t>(y)] = high.at(xcol, y);
        analyze_1d(column.data(), h, scratch.data(), lo_buf.data(), hi_buf.data());
        for (int y = 0; y < mh; ++y) {
            out.hl.at(xcol, y) = lo_buf[static_cast<std::size_t>(y)];
            out.hh.at(xcol, y) = hi_buf[static_cast<std::size_t>(y)];
        }
    }
    return out;
}

Matd synthesize_level(const Matd& ll, const Matd& lh, const Matd& hl, const Matd& hh, int w,
                      int h) {
    int mw = ll.width;
    int mh = ll.height;

    std::vector<double> scratch(static_cast<std::size_t>(extended(std::max(w, h)) + 1));
    std::vector<double> out_buf(static_cast<std::size_t>(std::max(w, h)));
    std::vector<double> lo_col(static_cast<std::size_t>(mh));
    std::vector<double> hi_col(static_cast<std::size_t>(mh));

    Matd low = make_matd(mw, h);
    Matd high = make_matd(mw, h);
    for (int xcol = 0; xcol < mw; ++xcol) {
        for (int y = 0; y < mh; ++y) {
            lo_col[static_cast<std::size_t>(y)] = ll.at(xcol, y);
            hi_col[static_cast<std::size_t>(y)] = lh.at(xcol, y);
        }
        synthesize_1d(lo_col.data(), hi_col.data(), h, scratch.data(), out_buf.data());
        for (int y = 0; y < h; ++y) low.at(xcol, y) = out_buf[static_cast<std::size_t>(y)];

        for (int y = 0; y < mh; ++y) {
            lo_col[static_cast<std::size_t>(y)] = hl.at(xcol, y);
            hi_col[static_cast<std::size_t>(y)] = hh.at(xcol, y);
        }
        synthesize_1d(lo_col.data(), hi_col.data(), h, scratch.data(), out_buf.data());
        for (int y = 0; y < h; ++y) high.at(xcol, y) = out_buf[static_cast<std::size_t>(y)];
    }

    Matd x = make_matd(w, h);
    std::vector<double> lo_row(static_cast<std::size_t>(mw));
    std::vector<double> hi_row(static_cast<std::size_t>(mw));
    for (int y = 0; y < h; ++y) {
        for (int i = 0; i < mw; ++i) {
            lo_row[static_cast<std::size_t>(i)] = low.at(i, y);
            hi_row[static_cast<std::size_t>(i)] = high.at(i, y);
        }
        synthesize_1d(lo_row.data(), hi_row.data(), w, scratch.data(), out_buf.data());
        for (int i = 0; i < w; ++i) x.at(i, y) = out_buf[static_cast<std::size_t>(i)];
    }
    return x;
}

} // namespace

Matd make_matd(int width, int height, double fill) {
    if (width <= 0 || height <= 0) throw DataError("zero-area matrix");
    Matd m;
    m.width = width;
    m.height = height;
    m.v.assign(static_cast<std::size_t>(width) * height, fill);
    return m;
}

WaveletPyramid dwt2(const RasterF32& x, int levels) {
    validate_dims(x.width, x.height, x.samples.size());
    if (levels < 1) throw ConfigError("dwt2: levels must be >= 1");
    int min_dim = std::min(x.width, x.height);
    if (min_dim < (1 << levels)) {
        throw DataError("plane too small for requested depth: " + std::to_string(x.width) + "x" +
                        std::to_string(x.height) + " at " + std::to_string(levels) + " levels");
    }

    Matd current = make_matd(x.width, x.height);
    for (std::size_t i = 0; i < x.samples.size(); ++i) current.v[i] = x.samples[i];

    WaveletPyramid pyramid;
    pyramid.levels.reserve(static_cast<std::size_t>(levels));
    for (int lev = 0; lev < levels; ++lev) {
        LevelSplit split = analyze_level(current);
        WaveletPyramid::Level level;
        level.lh = std::move(split.lh);
        level.hl = std::move(split.hl);
        level.hh = std::move(split.hh);
        level.src_w = current.width;
        level.src_h = current.height;
        pyramid.levels.push_back(std::move(level));
        current = std::move(split.ll);
    }
    pyramid.ll = std::move(current);
    return pyramid;
}

RasterF32 idwt2(const WaveletPyramid& pyramid) {
    if (pyramid.levels.empty()) throw DataError("idwt2: empty pyramid");
    Matd current = pyramid.ll;
    for (auto it = pyramid.levels.rbegin(); it != pyramid.levels.rend(); ++it) {
        current = synthesize_level(current, it->lh, it->hl, it->hh, it->src_w, it->src_h);
    }
    RasterF32 out = make_raster(current.width, current.height);
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        out.samples[i] = static_cast<float>(current.v[i]);
    }
    return out;
}

} // namespace prnu
