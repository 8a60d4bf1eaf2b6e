#pragma once

// Edge-guided variational super-resolution. The unknown is the amplitude
// field A (so every energy term is quadratic); the reconstructed power map
// is A^2. Guidance enters as a [0,1] edge map K that down-weights smoothing
// across boundaries and masks the Helmholtz residual off them.

#include <optional>
#include <vector>

#include "rmsup/grid.hpp"
#include "rmsup/helm_edge.hpp"

namespace rmsup {

// How the descent step length is chosen each iteration.
struct StepRule {
    enum class Kind { FixedStep, BacktrackingLineSearch };
    Kind kind = Kind::BacktrackingLineSearch;
    double eta = 1.0; // step length for FixedStep

    void validate() const;
};

struct SrConfig {
    double lambda_data = 1.0;       // data-fidelity weight
    double lambda_smooth = 0.1;     // boundary-weighted smoothness weight
    double lambda_helm = 0.0;       // optional Helmholtz-residual weight
    double k_eff = 0.0;             // effective wavenumber in the residual
    double edge_weight_floor = 0.05;// smoothness weight on edge cells, in [0,1)
    int max_iters = 500;
    double grad_tol = 1e-6;         // stop when the max-abs gradient drops below
    StepRule step_rule;

    void validate() const;
};

struct SrResult {
    Grid2D p_hat;                    // reconstructed power map in [0,1]
    int iterations = 0;
    double final_energy = 0.0;
    std::vector<double> energy_trace; // E(A^0), then one entry per accepted step
    bool converged = false;
};

// Per-cell energy weights derived from an edge map at the output resolution.
struct SrWeights {
    Grid2D smooth; // floor + (1 - floor) * (1 - K)
    Grid2D helm;   // 1 - K, masks the Helmholtz residual off edges

    static SrWeights uniform(int width, int height, double spacing_h);
};

// w = floor + (1 - floor) * (1 - K): edge cells (K = 1) get the floor weight,
// smooth cells get 1. A guess given at a coarser size is first lifted to
// out_w x out_h by bilinear interpolation. Values outside [0,1] are rejected.
Grid2D build_edge_weights(const Grid2D& k_guess, double floor, int out_w, int out_h);

// Builds both weight grids (smoothness and residual mask) from a guess.
SrWeights weights_from_guidance(const Grid2D& k_guess, double floor, int out_w, int out_h);

// E(A) = lambda_data  * mean_lr   (A(s*i, s*j) - sqrt(P_LR(i,j)))^2
//      + lambda_smooth* mean_cells w * ((Dx A)^2 + (Dy A)^2)
//      + lambda_helm  * mean_cells (1-K) * (lap(A) + k_eff^2 * A)^2
// with forward differences (replicate border, so border differences vanish)
// and the replicate-padded 5-point Laplacian. The stride s is inferred from
// the shapes and must divide both dimensions exactly.
double sr_energy(const Grid2D& a, const Grid2D& p_lr, const SrWeights& weights,
                 const SrConfig& config);

// Exact gradient of sr_energy with respect to each cell of A.
Grid2D sr_energy_grad(const Grid2D& a, const Grid2D& p_lr, const SrWeights& weights,
                      const SrConfig& config);

// Projected gradient descent from A^0 = bilinear-upsampled sqrt(P_LR):
// step, clamp A >= 0, repeat until the gradient tolerance or max_iters.
// With the backtracking rule the energy trace is non-increasing.
SrResult reconstruct(const Grid2D& p_lr, const std::optional<Grid2D>& guidance, int s,
                     const SrConfig& config);

enum class GuidanceMethod { KEdge, LBP, Canny, None };

// Edge map for the requested method from a [0,1] power grid: the curvature
// sign map is computed on the amplitude sqrt(P); LBP and Canny operate on
// the power grid directly. None yields an absent mask (uniform weights).
std::optional<Grid2D> guidance_from_method(const Grid2D& power, GuidanceMethod method,
                                           const EdgeParams& params);

GuidanceMethod parse_guidance_method(const std::string& name);
const char* guidance_method_name(GuidanceMethod method);

} // namespace rmsup
