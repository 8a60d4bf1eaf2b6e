#include "rmsup/recon.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rmsup/resample.hpp"

namespace rmsup {

void StepRule::validate() const {
    if (kind == Kind::FixedStep && !(eta > 0.0))
        fail(Errc::InvalidArgument, "StepRule: fixed step length must be positive");
}

void SrConfig::validate() const {
    if (lambda_data < 0.0 || lambda_smooth < 0.0 || lambda_helm < 0.0)
        fail(Errc::InvalidArgument, "SrConfig: negative term weight");
    if (k_eff < 0.0)
        fail(Errc::InvalidArgument, "SrConfig: negative k_eff");
    if (edge_weight_floor < 0.0 || edge_weight_floor >= 1.0)
        fail(Errc::InvalidArgument, "SrConfig: edge_weight_floor outside [0,1)");
    if (max_iters < 1)
        fail(Errc::InvalidArgument, "SrConfig: max_iters must be positive");
    if (!(grad_tol > 0.0))
        fail(Errc::InvalidArgument, "SrConfig: grad_tol must be positive");
    step_rule.validate();
}

SrWeights SrWeights::uniform(int width, int height, double spacing_h) {
    return {Grid2D::filled(width, height, spacing_h, 1.0),
            Grid2D::filled(width, height, spacing_h, 1.0)};
}

Grid2D build_edge_weights(const Grid2D& k_guess, double floor, int out_w, int out_h) {
    if (floor < 0.0 || floor >= 1.0)
        fail(Errc::InvalidArgument, "build_edge_weights: floor outside [0,1)");
    for (double v : k_guess.values())
        if (v < 0.0 || v > 1.0)
            fail(Errc::ValueOutOfRange, "build_edge_weights: edge map outside [0,1]");
    const Grid2D k_hr = (k_guess.width() == out_w && k_guess.height() == out_h)
                            ? k_guess
                            : upsample_bilinear(k_guess, out_w, out_h);
    std::vector<double> w(k_hr.size());
    for (std::size_t c = 0; c < w.size(); ++c)
        w[c] = floor + (1.0 - floor) * (1.0 - k_hr[c]);
    return Grid2D(out_w, out_h, k_hr.spacing(), std::move(w));
}

SrWeights weights_from_guidance(const Grid2D& k_guess, double floor, int out_w, int out_h) {
    Grid2D smooth = build_edge_weights(k_guess, floor, out_w, out_h);
    const double spacing = smooth.spacing();
    std::vector<double> helm(smooth.size());
    // Recover 1 - K from the smoothness weights: w = floor + (1-floor)(1-K).
    for (std::size_t c = 0; c < helm.size(); ++c)
        helm[c] = (smooth[c] - floor) / (1.0 - floor);
    return {std::move(smooth), Grid2D(out_w, out_h, spacing, std::move(helm))};
}

namespace {

// Infers the sampling stride from the grid shapes; both axes must agree.
int infer_stride(const Grid2D& a, const Grid2D& p_lr) {
    if (a.width() % p_lr.width() != 0 || a.height() % p_lr.height() != 0)
        fail(Errc::DimensionMismatch, "sr_energy: output shape is not a multiple of input");
    const int s = a.width() / p_lr.width();
    if (s != a.height() / p_lr.height())
        fail(Errc::DimensionMismatch, "sr_energy: stride differs between axes");
    return s;
}

void require_weight_shape(const Grid2D& a, const SrWeights& weights) {
    if (!weights.smooth.same_shape(a) || !weights.helm.same_shape(a))
        fail(Errc::DimensionMismatch, "sr_energy: weight grids must match output shape");
}

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Replicate-padded 5-point Laplacian divided by h^2, written directly so the
// adjoint below can mirror the same clamped indexing.
std::vector<double> lap5(const Grid2D& a) {
    const int w = a.width(), h = a.height();
    if (w < 3 || h < 3)
        fail(Errc::GridTooSmall, "sr_energy: Helmholtz term needs at least 3x3");
    const double inv_h2 = 1.0 / (a.spacing() * a.spacing());
    std::vector<double> out(a.size());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const double c = a.at(i, j);
            out[std::size_t(i) * w + j] =
                (a.at(clampi(i - 1, 0, h - 1), j) + a.at(clampi(i + 1, 0, h - 1), j) +
                 a.at(i, clampi(j - 1, 0, w - 1)) + a.at(i, clampi(j + 1, 0, w - 1)) -
                 4.0 * c) *
                inv_h2;
        }
    return out;
}

// Adjoint of lap5: scatters q through the same clamped stencil.
std::vector<double> lap5_adjoint(const std::vector<double>& q, int w, int h, double spacing) {
    const double inv_h2 = 1.0 / (spacing * spacing);
    std::vector<double> out(q.size(), 0.0);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const double v = q[std::size_t(i) * w + j] * inv_h2;
            out[std::size_t(clampi(i - 1, 0, h - 1)) * w + j] += v;
            out[std::size_t(clampi(i + 1, 0, h - 1)) * w + j] += v;
            out[std::size_t(i) * w + clampi(j - 1, 0, w - 1)] += v;
            out[std::size_t(i) * w + clampi(j + 1, 0, w - 1)] += v;
            out[std::size_t(i) * w + j] -= 4.0 * v;
        }
    return out;
}

} // namespace

double sr_energy(const Grid2D& a, const Grid2D& p_lr, const SrWeights& weights,
                 const SrConfig& config) {
    config.validate();
    require_weight_shape(a, weights);
    const int s = infer_stride(a, p_lr);
    const int w = a.width(), h = a.height();
    const double n_cells = double(a.size());

    double data = 0.0;
    for (int i = 0; i < p_lr.height(); ++i)
        for (int j = 0; j < p_lr.width(); ++j) {
            const double p = p_lr.at(i, j);
            if (p < 0.0)
                fail(Errc::NegativePower, "sr_energy: negative input power");
            const double d = a.at(i * s, j * s) - std::sqrt(p);
            data += d * d;
        }
    data /= double(p_lr.size());

    double smooth = 0.0;
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const double c = a.at(i, j);
            const double dx = j + 1 < w ? a.at(i, j + 1) - c : 0.0;
            const double dy = i + 1 < h ? a.at(i + 1, j) - c : 0.0;
            smooth += weights.smooth.at(i, j) * (dx * dx + dy * dy);
        }
    smooth /= n_cells;

    double helm = 0.0;
    if (config.lambda_helm > 0.0) {
        const std::vector<double> lap = lap5(a);
        const double k_sq = config.k_eff * config.k_eff;
        for (std::size_t c = 0; c < lap.size(); ++c) {
            const double r = lap[c] + k_sq * a[c];
            helm += weights.helm[c] * r * r;
        }
        helm /= n_cells;
    }

    return config.lambda_data * data + config.lambda_smooth * smooth +
           config.lambda_helm * helm;
}

Grid2D sr_energy_grad(const Grid2D& a, const Grid2D& p_lr, const SrWeights& weights,
                      const SrConfig& config) {
    config.validate();
    require_weight_shape(a, weights);
    const int s = infer_stride(a, p_lr);
    const int w = a.width(), h = a.height();
    const double n_cells = double(a.size());
    std::vector<double> grad(a.size(), 0.0);

    const double data_scale = 2.0 * config.lambda_data / double(p_lr.size());
    for (int i = 0; i < p_lr.height(); ++i)
        for (int j = 0; j < p_lr.width(); ++j) {
            const double p = p_lr.at(i, j);
            if (p < 0.0)
                fail(Errc::NegativePower, "sr_energy_grad: negative input power");
            grad[std::size_t(i * s) * w + std::size_t(j * s)] +=
                data_scale * (a.at(i * s, j * s) - std::sqrt(p));
        }

    const double smooth_scale = 2.0 * config.lambda_smooth / n_cells;
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const double wc = smooth_scale * weights.smooth.at(i, j);
            const double c = a.at(i, j);
            if (j + 1 < w) {
                const double dx = a.at(i, j + 1) - c;
                grad[std::size_t(i) * w + j + 1] += wc * dx;
                grad[std::size_t(i) * w + j] -= wc * dx;
            }
            if (i + 1 < h) {
                const double dy = a.at(i + 1, j) - c;
                grad[std::size_t(i + 1) * w + j] += wc * dy;
                grad[std::size_t(i) * w + j] -= wc * dy;
            }
        }

    if (config.lambda_helm > 0.0) {
        const std::vector<double> lap = lap5(a);
        const double k_sq = config.k_eff * config.k_eff;
        const double helm_scale = 2.0 * config.lambda_helm / n_cells;
        std::vector<double> q(a.size());
        for (std::size_t c = 0; c < q.size(); ++c)
            q[c] = helm_scale * weights.helm[c] * (lap[c] + k_sq * a[c]);
        const std::vector<double> adj = lap5_adjoint(q, w, h, a.spacing());
        for (std::size_t c = 0; c < grad.size(); ++c)
            grad[c] += adj[c] + k_sq * q[c];
    }

    return Grid2D(w, h, a.spacing(), std::move(grad));
}

SrResult reconstruct(const Grid2D& p_lr, const std::optional<Grid2D>& guidance, int s,
                     const SrConfig& config) {
    config.validate();
    if (s < 1)
        fail(Errc::InvalidArgument, "reconstruct: stride must be >= 1");
    const int out_w = p_lr.width() * s;
    const int out_h = p_lr.height() * s;

    const Grid2D a_lr = amplitude(p_lr).grid();
    Grid2D a = s == 1 ? a_lr : upsample_bilinear(a_lr, out_w, out_h);

    const SrWeights weights =
        guidance ? weights_from_guidance(*guidance, config.edge_weight_floor, out_w, out_h)
                 : SrWeights::uniform(out_w, out_h, a.spacing());

    SrResult result{Grid2D::filled(out_w, out_h, a.spacing(), 0.0), 0, 0.0, {}, false};
    double energy = sr_energy(a, p_lr, weights, config);
    result.energy_trace.push_back(energy);

    const bool backtracking = config.step_rule.kind == StepRule::Kind::BacktrackingLineSearch;
    constexpr double armijo_c = 1e-4;
    double eta = backtracking ? 1.0 : config.step_rule.eta;

    for (int iter = 0; iter < config.max_iters; ++iter) {
        const Grid2D grad = sr_energy_grad(a, p_lr, weights, config);
        double grad_inf = 0.0;
        for (double g : grad.values()) grad_inf = std::max(grad_inf, std::abs(g));
        if (grad_inf < config.grad_tol) {
            result.converged = true;
            break;
        }

        auto take_step = [&](double step) {
            std::vector<double> trial(a.size());
            for (std::size_t c = 0; c < trial.size(); ++c)
                trial[c] = std::max(a[c] - step * grad[c], 0.0);
            return Grid2D(out_w, out_h, a.spacing(), std::move(trial));
        };

        if (backtracking) {
            // The data-term curvature scales like 1/n^2, so useful steps can be
            // enormous; grow the trial step from twice the last accepted one
            // and let Armijo halving pull it back down.
            double step = 2.0 * eta;
            bool accepted = false;
            while (step > 1e-20) {
                Grid2D trial = take_step(step);
                const double trial_energy = sr_energy(trial, p_lr, weights, config);
                // Projected-arc Armijo: decrease proportional to grad . (a - trial).
                double agreement = 0.0;
                for (std::size_t c = 0; c < a.size(); ++c)
                    agreement += grad[c] * (a[c] - trial[c]);
                if (std::isfinite(trial_energy) &&
                    trial_energy <= energy - armijo_c * agreement) {
                    a = std::move(trial);
                    energy = trial_energy;
                    eta = step;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break; // no achievable decrease: numerically at a minimum
        } else {
            a = take_step(eta);
            energy = sr_energy(a, p_lr, weights, config);
        }

        result.energy_trace.push_back(energy);
        result.iterations = iter + 1;
    }

    result.final_energy = energy;
    std::vector<double> p_hat(a.size());
    for (std::size_t c = 0; c < p_hat.size(); ++c)
        p_hat[c] = std::clamp(a[c] * a[c], 0.0, 1.0);
    result.p_hat = Grid2D(out_w, out_h, a.spacing(), std::move(p_hat));
    return result;
}

std::optional<Grid2D> guidance_from_method(const Grid2D& power, GuidanceMethod method,
                                           const EdgeParams& params) {
    switch (method) {
    case GuidanceMethod::None:
        return std::nullopt;
    case GuidanceMethod::KEdge:
        return mask_to_grid(k_edge_map(amplitude(power), params), power.spacing());
    case GuidanceMethod::LBP:
        return mask_to_grid(lbp_edge(power, params), power.spacing());
    case GuidanceMethod::Canny:
        return mask_to_grid(canny(power, params), power.spacing());
    }
    fail(Errc::InvalidArgument, "guidance_from_method: unknown method");
}

GuidanceMethod parse_guidance_method(const std::string& name) {
    if (name == "kedge") return GuidanceMethod::KEdge;
    if (name == "lbp") return GuidanceMethod::LBP;
    if (name == "canny") return GuidanceMethod::Canny;
    if (name == "base" || name == "none") return GuidanceMethod::None;
    fail(Errc::InvalidArgument, "unknown guidance method '" + name + "'");
}

const char* guidance_method_name(GuidanceMethod method) {
    switch (method) {
    case GuidanceMethod::KEdge: return "kedge";
    case GuidanceMethod::LBP: return "lbp";
    case GuidanceMethod::Canny: return "canny";
    case GuidanceMethod::None: return "base";
    }
    return "?";
}

} // namespace rmsup
