#pragma once

// Diffusion-process numerics: forward/reverse steps for a DDPM-style
// discretization and a constant-drift decoupled process, the score/denoiser
// relation, generic SDE/ODE single steps, and the training-loss formulas.
// Every operation takes caller-supplied noise so results are reproducible.

#include <functional>
#include <vector>

#include "rmsup/error.hpp"

namespace rmsup {

// Noise schedule. Two kinds:
//  - ConstantDriftDDM: continuous t in [0,1], attenuation gamma(t) = 1 - t,
//    noise variance delta_sq(t) = t. The drift is constant, f = -x0.
//  - DDPM: discrete per-step arrays alpha, beta and the cumulative
//    product abar, related by alpha_k = sqrt(1 - beta_k) and
//    abar_k = prod_{s<=k} (1 - beta_s).
struct Schedule {
    enum class Kind { ConstantDriftDDM, DDPM };

    Kind kind = Kind::ConstantDriftDDM;
    std::vector<double> alpha;  // DDPM only
    std::vector<double> beta;   // DDPM only
    std::vector<double> abar;   // DDPM only

    static Schedule constant_drift_ddm();
    // Builds the DDPM arrays from per-step noise rates beta_k in (0,1).
    static Schedule ddpm_from_betas(const std::vector<double>& betas);
    // Accepts externally computed arrays; rejects them unless abar agrees
    // with the running product of alpha_k^2 to within 1e-12.
    static Schedule ddpm(std::vector<double> alpha, std::vector<double> beta,
                         std::vector<double> abar);

    int steps() const;               // DDPM step count
    double gamma(double t) const;    // DDM attenuation, 1 - t
    double delta_sq(double t) const; // DDM marginal noise variance, t

private:
    void require_kind(Kind want, const char* what) const;
};

// A point of a diffusion trajectory: flattened values plus the time (real
// t in [0,1] for DDM, step index cast to double for DDPM).
struct DiffusionState {
    std::vector<double> x;
    double t = 0.0;

    void validate(const Schedule& schedule) const;
};

// What a denoiser predicts from (x_t, t): the drift estimate f_hat and the
// noise estimate eps_hat.
struct DenoiserOutput {
    std::vector<double> f_hat;
    std::vector<double> eps_hat;
};

// Weights for the combined training loss.
struct LossWeights {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double lambda3 = 1.0;

    void validate() const; // nonnegative, not all zero
};

// One forward DDPM step: x_t = alpha_k * x_prev + sqrt(beta_k) * noise.
// `step` indexes the schedule arrays (0-based).
std::vector<double> ddpm_forward_step(const std::vector<double>& x_prev, int step,
                                      const Schedule& schedule,
                                      const std::vector<double>& noise);

// Score estimate from a noise estimate: s = -eps_hat / sqrt(1 - abar_t).
std::vector<double> score_from_eps(const std::vector<double>& eps_hat, double abar_t);

// Closed-form forward marginal of the constant-drift process:
// x_t = (1 - t) * x0 + sqrt(t) * noise.
std::vector<double> ddm_forward_sample(const std::vector<double>& x0, double t,
                                       const std::vector<double>& noise);

// One reverse step from t to t - dt (requires 0 < dt <= t <= 1):
//   mean   = x_t - dt * f_hat - (dt / sqrt(t)) * eps_hat
//   stddev = sqrt(dt * (t - dt) / t)
//   out    = mean + stddev * noise
// The final step (dt = t) is deterministic: the stddev factor is zero.
std::vector<double> ddm_reverse_step(const std::vector<double>& x_t, double t, double dt,
                                     const DenoiserOutput& denoiser_out,
                                     const std::vector<double>& noise);

// Analytic denoiser for coordinates drawn iid from N(mu0, var0): returns the
// posterior mean of x0 given x_t = (1-t) x0 + sqrt(t) eps,
//   x0_hat = mu0 + (1-t) var0 (x_t - (1-t) mu0) / ((1-t)^2 var0 + t),
// then f_hat = -x0_hat and eps_hat = (x_t - (1-t) x0_hat) / sqrt(t).
DenoiserOutput gaussian_oracle_denoiser(const std::vector<double>& x_t, double t,
                                        double mu0, double var0);

using DriftFn = std::function<std::vector<double>(const std::vector<double>&, double)>;
using DiffusionFn = std::function<double(double)>;
using ScoreFn = std::function<std::vector<double>(const std::vector<double>&, double)>;

// Euler-Maruyama step of the reverse-time SDE (time decreasing):
//   x' = x - [f(x,t) - g(t)^2 * score(x,t)] * dt + g(t) * sqrt(dt) * noise
std::vector<double> reverse_sde_step(const std::vector<double>& x, double t, double dt,
                                     const DriftFn& drift_f, const DiffusionFn& diffusion_g,
                                     const ScoreFn& score, const std::vector<double>& noise);

// Explicit Euler step of the probability-flow ODE (time decreasing):
//   x' = x - [f(x,t) - 0.5 * g(t)^2 * score(x,t)] * dt
std::vector<double> pf_ode_step(const std::vector<double>& x, double t, double dt,
                                const DriftFn& drift_f, const DiffusionFn& diffusion_g,
                                const ScoreFn& score);

// Mean-over-elements squared errors. loss_drift compares f_hat against -x0.
double loss_drift(const std::vector<double>& f_hat, const std::vector<double>& x0);
double loss_noise(const std::vector<double>& eps_hat, const std::vector<double>& eps);
double loss_recon(const std::vector<double>& z0_hat, const std::vector<double>& z0);

// lambda1 * ld + lambda2 * ln + lambda3 * lr.
double loss_total(double ld, double ln, double lr, const LossWeights& weights);

// Negative ELBO with a diagonal-Gaussian posterior:
// recon_sq_err + 0.5 * sum(mu^2 + exp(logvar) - 1 - logvar).
double vae_loss(double recon_sq_err, const std::vector<double>& mu,
                const std::vector<double>& logvar);

} // namespace rmsup
