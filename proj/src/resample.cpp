#include "rmsup/resample.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rmsup {

SamplingSpec SamplingSpec::make(int hr_size, int stride) {
    if (hr_size <= 0 || stride <= 0)
        fail(Errc::InvalidArgument, "SamplingSpec: sizes must be positive");
    if (hr_size % stride != 0)
        fail(Errc::IndivisibleStride, "SamplingSpec: hr size not divisible by stride");
    return {stride, hr_size, hr_size / stride};
}

Grid2D uniform_downsample(const Grid2D& g, int s) {
    if (s <= 0)
        fail(Errc::InvalidArgument, "uniform_downsample: stride must be positive");
    if (g.width() % s != 0 || g.height() % s != 0)
        fail(Errc::IndivisibleStride, "uniform_downsample: dimensions not divisible by stride");
    const int ow = g.width() / s, oh = g.height() / s;
    std::vector<double> out(std::size_t(ow) * oh);
    for (int i = 0; i < oh; ++i)
        for (int j = 0; j < ow; ++j)
            out[std::size_t(i) * ow + j] = g.at(s * i, s * j);
    return Grid2D(ow, oh, g.spacing() * s, std::move(out));
}

namespace {

// Maps output index to a continuous source coordinate (align-corners) and
// returns the two enclosing integer taps with the right-hand weight.
struct Tap {
    int p0, p1;
    double w1; // weight of p1; weight of p0 is 1 - w1
};

Tap axis_tap(int out_idx, int out_n, int src_n) {
    if (out_n == 1) return {0, 0, 0.0};
    const double x = double(out_idx) * double(src_n - 1) / double(out_n - 1);
    int p0 = int(std::floor(x));
    if (p0 > src_n - 2) p0 = src_n - 2;
    const double f = x - double(p0);
    return {p0, p0 + 1, f};
}

double out_spacing(double spacing, int src_n, int out_n) {
    if (out_n <= 1) return spacing;
    return spacing * double(src_n - 1) / double(out_n - 1);
}

Grid2D bilinear_impl(const Grid2D& g, int out_w, int out_h) {
    const int sw = g.width(), sh = g.height();
    std::vector<double> out(std::size_t(out_w) * out_h);
    for (int i = 0; i < out_h; ++i) {
        const Tap ty = axis_tap(i, out_h, sh);
        for (int j = 0; j < out_w; ++j) {
            const Tap tx = axis_tap(j, out_w, sw);
            const double v00 = g.at(ty.p0, tx.p0), v01 = g.at(ty.p0, tx.p1);
            const double v10 = g.at(ty.p1, tx.p0), v11 = g.at(ty.p1, tx.p1);
            out[std::size_t(i) * out_w + j] =
                (1.0 - ty.w1) * ((1.0 - tx.w1) * v00 + tx.w1 * v01) +
                ty.w1 * ((1.0 - tx.w1) * v10 + tx.w1 * v11);
        }
    }
    return Grid2D(out_w, out_h, out_spacing(g.spacing(), sw, out_w), std::move(out));
}

} // namespace

Grid2D bilinear_resample(const Grid2D& g, int out_w, int out_h) {
    if (out_w < 2 || out_h < 2)
        fail(Errc::InvalidArgument, "bilinear_resample: output size must be >= 2");
    if (g.width() < 2 || g.height() < 2)
        fail(Errc::SourceTooSmall, "bilinear_resample: source must be >= 2x2");
    return bilinear_impl(g, out_w, out_h);
}

Grid2D bilinear_resample(const Grid2D& g, int n) { return bilinear_resample(g, n, n); }

LrPair make_lr_pair(const Grid2D& p, const BinaryMask& k, int s) {
    if (p.width() != k.width() || p.height() != k.height())
        fail(Errc::DimensionMismatch, "make_lr_pair: power and edge map dimensions differ");
    Normalized p_lr = normalize_minmax(uniform_downsample(p, s));
    const int nw = p.width() / s, nh = p.height() / s;
    Grid2D k_real = mask_to_grid(k, p.spacing());
    Grid2D k_ds = (s == 1) ? std::move(k_real) : bilinear_resample(k_real, nw, nh);
    Normalized k_lr = normalize_minmax(k_ds);
    return {std::move(p_lr.grid), std::move(k_lr.grid), p_lr.lo, p_lr.hi};
}

Grid2D upsample_bilinear(const Grid2D& g, int out_w, int out_h) {
    if (out_w < g.width() || out_h < g.height())
        fail(Errc::InvalidArgument, "upsample_bilinear: output smaller than source");
    if (out_w == g.width() && out_h == g.height()) return g;
    if (g.width() < 2 || g.height() < 2)
        fail(Errc::SourceTooSmall, "upsample_bilinear: source must be >= 2x2");
    return bilinear_impl(g, out_w, out_h);
}

namespace {

// Catmull-Rom weights for the four taps around fractional offset f in [0,1).
inline void catmull_rom(double f, double w[4]) {
    const double f2 = f * f, f3 = f2 * f;
    w[0] = 0.5 * (-f3 + 2.0 * f2 - f);
    w[1] = 0.5 * (3.0 * f3 - 5.0 * f2 + 2.0);
    w[2] = 0.5 * (-3.0 * f3 + 4.0 * f2 + f);
    w[3] = 0.5 * (f3 - f2);
}

} // namespace

Grid2D upsample_bicubic(const Grid2D& g, int out_w, int out_h) {
    if (out_w < g.width() || out_h < g.height())
        fail(Errc::InvalidArgument, "upsample_bicubic: output smaller than source");
    if (out_w == g.width() && out_h == g.height()) return g;
    if (g.width() < 2 || g.height() < 2)
        fail(Errc::SourceTooSmall, "upsample_bicubic: source must be >= 2x2");

    const int sw = g.width(), sh = g.height();
    const auto [lo, hi] = g.minmax();
    std::vector<double> out(std::size_t(out_w) * out_h);
    for (int i = 0; i < out_h; ++i) {
        const double y = (out_h == 1) ? 0.0 : double(i) * double(sh - 1) / double(out_h - 1);
        const int iy = std::min(int(std::floor(y)), sh - 2);
        const double fy = y - double(iy);
        double wy[4];
        catmull_rom(fy, wy);
        for (int j = 0; j < out_w; ++j) {
            const double x = (out_w == 1) ? 0.0 : double(j) * double(sw - 1) / double(out_w - 1);
            const int ix = std::min(int(std::floor(x)), sw - 2);
            const double fx = x - double(ix);
            double wx[4];
            catmull_rom(fx, wx);
            double acc = 0.0;
            for (int a = 0; a < 4; ++a) {
                const int si = std::clamp(iy + a - 1, 0, sh - 1);
                double row = 0.0;
                for (int b = 0; b < 4; ++b) {
                    const int sj = std::clamp(ix + b - 1, 0, sw - 1);
                    row += wx[b] * g.at(si, sj);
                }
                acc += wy[a] * row;
            }
            out[std::size_t(i) * out_w + j] = std::clamp(acc, lo, hi);
        }
    }
    return Grid2D(out_w, out_h, out_spacing(g.spacing(), sw, out_w), std::move(out));
}

} // namespace rmsup
