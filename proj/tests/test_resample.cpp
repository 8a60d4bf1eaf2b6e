#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "rmsup/resample.hpp"
#include "rmsup/rng.hpp"

using namespace rmsup;

namespace {

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::Ok;
}

Grid2D random_grid(int w, int h, double spacing, std::uint64_t seed, double lo, double hi) {
    SplitMix64 rng(seed);
    std::vector<double> v(std::size_t(w) * h);
    for (double& x : v) x = rng.next_range(lo, hi);
    return Grid2D(w, h, spacing, std::move(v));
}

} // namespace

TEST_SUITE("resample") {

TEST_CASE("sampling spec validates divisibility") {
    const SamplingSpec spec = SamplingSpec::make(128, 4);
    CHECK(spec.hr_size_n == 128);
    CHECK(spec.stride_s == 4);
    CHECK(spec.lr_size_n == 32);
    CHECK(code_of([] { SamplingSpec::make(127, 4); }) == Errc::IndivisibleStride);
    CHECK(code_of([] { SamplingSpec::make(0, 4); }) == Errc::InvalidArgument);
    CHECK(code_of([] { SamplingSpec::make(16, -1); }) == Errc::InvalidArgument);
}

TEST_CASE("uniform downsample picks anchor cells and scales the spacing") {
    const Grid2D g(4, 4, 0.5,
                   {0, 1, 2, 3,
                    10, 11, 12, 13,
                    20, 21, 22, 23,
                    30, 31, 32, 33});
    const Grid2D d = uniform_downsample(g, 2);
    REQUIRE(d.width() == 2);
    REQUIRE(d.height() == 2);
    CHECK(d.spacing() == 1.0);
    CHECK(d.at(0, 0) == 0);
    CHECK(d.at(0, 1) == 2);
    CHECK(d.at(1, 0) == 20);
    CHECK(d.at(1, 1) == 22);
}

TEST_CASE("downsample with stride one is the identity") {
    const Grid2D g = random_grid(6, 5, 0.7, 3, -1.0, 1.0);
    const Grid2D d = uniform_downsample(g, 1);
    CHECK(d.spacing() == g.spacing());
    CHECK(d.vec() == g.vec());
}

TEST_CASE("downsample requires both dimensions divisible by the stride") {
    CHECK(code_of([] { uniform_downsample(Grid2D::filled(6, 4, 1.0, 0.0), 3); }) ==
          Errc::IndivisibleStride);
    CHECK(code_of([] { uniform_downsample(Grid2D::filled(6, 6, 1.0, 0.0), 4); }) ==
          Errc::IndivisibleStride);
    CHECK(code_of([] { uniform_downsample(Grid2D::filled(6, 6, 1.0, 0.0), 0); }) ==
          Errc::InvalidArgument);
}

TEST_CASE("bilinear resample reproduces source values at integral sample points") {
    const Grid2D g = random_grid(3, 3, 1.0, 4, 0.0, 1.0);
    const Grid2D up = bilinear_resample(g, 5, 5);
    // 5 outputs over 3 sources: x = j * 2/4 = j/2, integral at even j.
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(up.at(2 * i, 2 * j) == g.at(i, j));
    // Odd positions sit exactly halfway between two sources.
    CHECK(up.at(0, 1) == doctest::Approx(0.5 * (g.at(0, 0) + g.at(0, 1))).epsilon(1e-15));
    CHECK(up.at(1, 0) == doctest::Approx(0.5 * (g.at(0, 0) + g.at(1, 0))).epsilon(1e-15));
}

TEST_CASE("bilinear resample with matching size reproduces the grid") {
    const Grid2D g = random_grid(4, 3, 1.0, 5, -2.0, 2.0);
    const Grid2D same = bilinear_resample(g, 4, 3);
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(same[k] == doctest::Approx(g[k]).epsilon(1e-15));
}

TEST_CASE("align-corners keeps the four corners exact for any output size") {
    const Grid2D g = random_grid(4, 3, 1.0, 6, 0.0, 5.0);
    const Grid2D up = bilinear_resample(g, 9, 7);
    CHECK(up.at(0, 0) == g.at(0, 0));
    CHECK(up.at(0, 8) == g.at(0, 3));
    CHECK(up.at(6, 0) == g.at(2, 0));
    CHECK(up.at(6, 8) == g.at(2, 3));
}

TEST_CASE("bilinear resample reproduces affine ramps") {
    const int sw = 5, sh = 4;
    std::vector<double> v(std::size_t(sw) * sh);
    for (int i = 0; i < sh; ++i)
        for (int j = 0; j < sw; ++j) v[std::size_t(i) * sw + j] = 2.0 * j - 3.0 * i + 1.0;
    const Grid2D g(sw, sh, 1.0, std::move(v));
    const Grid2D up = bilinear_resample(g, 13, 10);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 13; ++j) {
            const double x = double(j) * double(sw - 1) / 12.0;
            const double y = double(i) * double(sh - 1) / 9.0;
            CHECK(up.at(i, j) == doctest::Approx(2.0 * x - 3.0 * y + 1.0).epsilon(1e-12));
        }
}

TEST_CASE("bilinear resample needs a 2x2 source and 2x2 output") {
    CHECK(code_of([] { bilinear_resample(Grid2D::filled(1, 4, 1.0, 0.0), 8, 8); }) ==
          Errc::SourceTooSmall);
    CHECK(code_of([] { bilinear_resample(Grid2D::filled(4, 4, 1.0, 0.0), 1, 8); }) ==
          Errc::InvalidArgument);
}

TEST_CASE("upsample_bilinear matches bilinear_resample and rejects shrinking") {
    const Grid2D g = random_grid(4, 4, 1.0, 7, 0.0, 1.0);
    const Grid2D a = upsample_bilinear(g, 11, 9);
    const Grid2D b = bilinear_resample(g, 11, 9);
    CHECK(a.vec() == b.vec());
    CHECK(code_of([&] { upsample_bilinear(g, 3, 8); }) == Errc::InvalidArgument);
}

TEST_CASE("bicubic upsampling passes through nodes and respects source bounds") {
    const Grid2D g = random_grid(4, 4, 1.0, 8, 0.0, 1.0);
    const Grid2D up = upsample_bicubic(g, 7, 7);
    // 7 outputs over 4 sources: x = j/2, integral at even indices.
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(up.at(2 * i, 2 * j) == doctest::Approx(g.at(i, j)).epsilon(1e-12));
    const auto [lo, hi] = g.minmax();
    for (std::size_t k = 0; k < up.size(); ++k) {
        CHECK(up[k] >= lo);
        CHECK(up[k] <= hi);
    }
}

TEST_CASE("bicubic reproduces linear ramps away from the replicated border") {
    // Clamped taps bend the interpolant near the border, so exact linear
    // reproduction only holds where all four taps are interior.
    const int n = 5;
    std::vector<double> v(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v[std::size_t(i) * n + j] = 0.1 * j + 0.05 * i;
    const Grid2D up = upsample_bicubic(Grid2D(n, n, 1.0, std::move(v)), 9, 9);
    for (int i = 2; i <= 5; ++i)
        for (int j = 2; j <= 5; ++j)
            CHECK(up.at(i, j) == doctest::Approx(0.05 * j + 0.025 * i).epsilon(1e-12));
}

TEST_CASE("make_lr_pair normalizes both channels and carries the power bounds") {
    const int n = 8, s = 2;
    const Grid2D p = random_grid(n, n, 1.0, 9, 0.2, 0.8);
    std::vector<std::uint8_t> bits(std::size_t(n) * n, 0);
    for (int i = 2; i < 5; ++i)
        for (int j = 3; j < 6; ++j) bits[std::size_t(i) * n + j] = 1;
    const BinaryMask k(n, n, std::move(bits));

    const LrPair lr = make_lr_pair(p, k, s);
    REQUIRE(lr.p_lr.width() == n / s);
    REQUIRE(lr.k_lr.width() == n / s);

    const Grid2D plain = uniform_downsample(p, s);
    const auto [lo, hi] = plain.minmax();
    CHECK(lr.p_lo == lo);
    CHECK(lr.p_hi == hi);
    for (std::size_t c = 0; c < plain.size(); ++c)
        CHECK(lr.p_lr[c] == doctest::Approx((plain[c] - lo) / (hi - lo)).epsilon(1e-15));

    const auto [klo, khi] = lr.k_lr.minmax();
    CHECK(klo == 0.0);
    CHECK(khi == 1.0);
}

TEST_CASE("make_lr_pair turns an empty edge mask into an all-zero channel") {
    const Grid2D p = random_grid(8, 8, 1.0, 10, 0.0, 1.0);
    const LrPair lr = make_lr_pair(p, BinaryMask::zeros(8, 8), 2);
    for (std::size_t c = 0; c < lr.k_lr.size(); ++c) CHECK(lr.k_lr[c] == 0.0);
}

TEST_CASE("make_lr_pair rejects mismatched shapes") {
    CHECK(code_of([] {
              make_lr_pair(Grid2D::filled(8, 8, 1.0, 0.5), BinaryMask::zeros(4, 4), 2);
          }) == Errc::DimensionMismatch);
}

TEST_CASE("downsampling a constant and lifting it back recovers the constant") {
    const Grid2D g = Grid2D::filled(12, 12, 1.0, 0.625);
    const Grid2D rt = upsample_bilinear(uniform_downsample(g, 4), 12, 12);
    // The interpolation weights only sum to one up to roundoff.
    for (std::size_t k = 0; k < rt.size(); ++k)
        CHECK(rt[k] == doctest::Approx(0.625).epsilon(1e-14));
}

} // TEST_SUITE("resample")
