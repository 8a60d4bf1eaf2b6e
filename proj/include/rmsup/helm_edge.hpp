#pragma once

#include "rmsup/grid.hpp"

namespace rmsup {

/// Curvature indicator field, units 1/m^2.
struct CurvatureMap {
    enum class Kind { EffectiveWavenumberSq, LogCurvature };

    Grid2D grid;
    Kind kind;
};

struct EdgeParams {
    double epsilon = 1e-6;       // stabilizer added to amplitude denominators
    double canny_sigma = 1.0;
    double canny_low = 0.05;
    double canny_high = 0.2;
    int lbp_edge_threshold = 2;  // transition count above which a cell is an edge
    bool k_sign_flip = false;    // mark k_eff^2 > 0 instead of < 0

    void validate() const;
};

/// 5-point finite-difference Laplacian over the grid, divided by h^2.
/// Border cells use replicate padding. Requires width, height >= 3.
Grid2D laplacian5(const Grid2D& g);
Grid2D laplacian5(const AmplitudeMap& a);

/// k_eff^2(i,j) = -lap(A)(i,j) / (A(i,j) + epsilon)
CurvatureMap k_eff_sq(const AmplitudeMap& a, const EdgeParams& params);

/// k_log(i,j) = -lap(log(A + epsilon))(i,j)
CurvatureMap k_log(const AmplitudeMap& a, const EdgeParams& params);

/// Binary K map: 1 where k_eff^2 < 0, else 0 (ties at 0 map to 0).
/// With k_sign_flip the inequality inverts to k_eff^2 > 0.
BinaryMask k_edge_map(const AmplitudeMap& a, const EdgeParams& params);

/// Canny baseline: Gaussian blur (radius ceil(3*sigma), replicate border),
/// Sobel 3x3 gradients, non-maximum suppression with 4-way angle
/// quantization, then double-threshold hysteresis with 8-connectivity.
BinaryMask canny(const Grid2D& g, const EdgeParams& params);

/// LBP baseline: per interior cell, 8-bit code with bit=1 iff neighbor >=
/// center (clockwise from top-left); edge iff the number of 0/1 transitions
/// around the circular code exceeds lbp_edge_threshold. Borders stay 0.
BinaryMask lbp_edge(const Grid2D& g, const EdgeParams& params);

} // namespace rmsup
