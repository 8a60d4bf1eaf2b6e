#pragma once

#include "rmsup/grid.hpp"

namespace rmsup {

struct SamplingSpec {
    int stride_s;
    int hr_size_n;
    int lr_size_n;

    /// Validates hr == stride * lr; throws IndivisibleStride otherwise.
    static SamplingSpec make(int hr_size, int stride);
};

///// Point subsampling: out(i,j) = in(s*i, s*j), 0-based anchor at the origin.
/// Output spacing is s*h. Both dimensions must be divisible by s.
Grid2D uniform_downsample(const Grid2D& g, int s);

/// Align-corners bilinear resampling to out_w x out_h. Sample locations that
/// land on integral source coordinates reproduce source values exactly.
Grid2D bilinear_resample(const Grid2D& g, int out_w, int out_h);
Grid2D bilinear_resample(const Grid2D& g, int n);

struct LrPair {
    Grid2D p_lr;      // normalized low-resolution power
    Grid2D k_lr;      // normalized low-resolution edge guidance
    double p_lo, p_hi; // pre-normalization bounds of the downsampled power
};

///// Low-resolution input pair: P_LR = minmax(downsample(P, s)),
/// K_LR = minmax(bilinear(K as reals, N/s)).
LrPair make_lr_pair(const Grid2D& p, const BinaryMask& k, int s);

/// Align-corners bilinear upsampling (same mapping as bilinear_resample).
Grid2D upsample_bilinear(const Grid2D& g, int out_w, int out_h);

/// Catmull-Rom bicubic upsampling with replicate borders; output clamped to
/// the source min/max.
Grid2D upsample_bicubic(const Grid2D& g, int out_w, int out_h);

} // namespace rmsup
