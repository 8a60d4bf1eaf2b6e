#include "rmsup/diffusion.hpp"

#include <cmath>
#include <string>

namespace rmsup {

namespace {

void require_same_size(const std::vector<double>& a, const std::vector<double>& b,
                       const char* what) {
    if (a.size() != b.size())
        fail(Errc::DimensionMismatch, std::string(what) + ": vector sizes differ (" +
                                          std::to_string(a.size()) + " vs " +
                                          std::to_string(b.size()) + ")");
}

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            fail(Errc::InvalidArgument, std::string(what) + ": non-finite entry");
}

} // namespace

void Schedule::require_kind(Kind want, const char* what) const {
    if (kind != want)
        fail(Errc::KindMismatch, std::string(what) + ": wrong schedule kind");
}

Schedule Schedule::constant_drift_ddm() {
    Schedule s;
    s.kind = Kind::ConstantDriftDDM;
    return s;
}

Schedule Schedule::ddpm_from_betas(const std::vector<double>& betas) {
    if (betas.empty())
        fail(Errc::InvalidArgument, "Schedule::ddpm_from_betas: empty beta array");
    Schedule s;
    s.kind = Kind::DDPM;
    s.beta = betas;
    s.alpha.reserve(betas.size());
    s.abar.reserve(betas.size());
    double running = 1.0;
    for (double b : betas) {
        if (!(b > 0.0) || !(b < 1.0))
            fail(Errc::InvalidArgument, "Schedule::ddpm_from_betas: beta outside (0,1)");
        s.alpha.push_back(std::sqrt(1.0 - b));
        running *= 1.0 - b;
        s.abar.push_back(running);
    }
    return s;
}

Schedule Schedule::ddpm(std::vector<double> alpha, std::vector<double> beta,
                        std::vector<double> abar) {
    if (alpha.empty() || alpha.size() != beta.size() || alpha.size() != abar.size())
        fail(Errc::DimensionMismatch, "Schedule::ddpm: array sizes differ or empty");
    double running = 1.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        if (!(beta[k] > 0.0) || !(beta[k] < 1.0))
            fail(Errc::InvalidArgument, "Schedule::ddpm: beta outside (0,1)");
        running *= alpha[k] * alpha[k];
        if (std::abs(abar[k] - running) > 1e-12)
            fail(Errc::InvalidArgument,
                 "Schedule::ddpm: abar inconsistent with per-step factors at step " +
                     std::to_string(k));
    }
    Schedule s;
    s.kind = Kind::DDPM;
    s.alpha = std::move(alpha);
    s.beta = std::move(beta);
    s.abar = std::move(abar);
    return s;
}

int Schedule::steps() const {
    require_kind(Kind::DDPM, "Schedule::steps");
    return int(beta.size());
}

double Schedule::gamma(double t) const {
    require_kind(Kind::ConstantDriftDDM, "Schedule::gamma");
    if (!(t >= 0.0) || !(t <= 1.0))
        fail(Errc::TimeOutOfRange, "Schedule::gamma: t outside [0,1]");
    return 1.0 - t;
}

double Schedule::delta_sq(double t) const {
    require_kind(Kind::ConstantDriftDDM, "Schedule::delta_sq");
    if (!(t >= 0.0) || !(t <= 1.0))
        fail(Errc::TimeOutOfRange, "Schedule::delta_sq: t outside [0,1]");
    return t;
}

void DiffusionState::validate(const Schedule& schedule) const {
    require_finite(x, "DiffusionState");
    if (schedule.kind == Schedule::Kind::ConstantDriftDDM) {
        if (!(t >= 0.0) || !(t <= 1.0))
            fail(Errc::TimeOutOfRange, "DiffusionState: t outside [0,1]");
    } else {
        const int k = int(t);
        if (double(k) != t || k < 0 || k >= int(schedule.beta.size()))
            fail(Errc::TimeOutOfRange, "DiffusionState: step index outside schedule");
    }
}

void LossWeights::validate() const {
    if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0)
        fail(Errc::InvalidArgument, "LossWeights: negative weight");
    if (lambda1 == 0.0 && lambda2 == 0.0 && lambda3 == 0.0)
        fail(Errc::InvalidArgument, "LossWeights: all weights zero");
}

std::vector<double> ddpm_forward_step(const std::vector<double>& x_prev, int step,
                                      const Schedule& schedule,
                                      const std::vector<double>& noise) {
    if (schedule.kind != Schedule::Kind::DDPM)
        fail(Errc::KindMismatch, "ddpm_forward_step: schedule is not DDPM");
    if (step < 0 || step >= int(schedule.beta.size()))
        fail(Errc::InvalidArgument, "ddpm_forward_step: step outside schedule");
    require_same_size(x_prev, noise, "ddpm_forward_step");
    const double a = schedule.alpha[std::size_t(step)];
    const double sb = std::sqrt(schedule.beta[std::size_t(step)]);
    std::vector<double> out(x_prev.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = a * x_prev[k] + sb * noise[k];
    return out;
}

std::vector<double> score_from_eps(const std::vector<double>& eps_hat, double abar_t) {
    if (!(abar_t > 0.0) || !(abar_t < 1.0))
        fail(Errc::DegenerateAlphaBar, "score_from_eps: abar_t outside (0,1)");
    const double inv = -1.0 / std::sqrt(1.0 - abar_t);
    std::vector<double> out(eps_hat.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = inv * eps_hat[k];
    return out;
}

std::vector<double> ddm_forward_sample(const std::vector<double>& x0, double t,
                                       const std::vector<double>& noise) {
    if (!(t >= 0.0) || !(t <= 1.0))
        fail(Errc::TimeOutOfRange, "ddm_forward_sample: t outside [0,1]");
    require_same_size(x0, noise, "ddm_forward_sample");
    const double g = 1.0 - t;
    const double sd = std::sqrt(t);
    std::vector<double> out(x0.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = g * x0[k] + sd * noise[k];
    return out;
}

std::vector<double> ddm_reverse_step(const std::vector<double>& x_t, double t, double dt,
                                     const DenoiserOutput& denoiser_out,
                                     const std::vector<double>& noise) {
    if (!(dt > 0.0) || !(dt <= t) || !(t <= 1.0))
        fail(Errc::BadTimeStep, "ddm_reverse_step: need 0 < dt <= t <= 1");
    require_same_size(x_t, denoiser_out.f_hat, "ddm_reverse_step f_hat");
    require_same_size(x_t, denoiser_out.eps_hat, "ddm_reverse_step eps_hat");
    require_same_size(x_t, noise, "ddm_reverse_step noise");
    const double sqrt_t = std::sqrt(t);
    // t - dt computed once so the dt = t final step gives exactly zero stddev.
    const double t_next = t - dt;
    const double stddev = std::sqrt(dt * t_next / t);
    std::vector<double> out(x_t.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double mean =
            x_t[k] - dt * denoiser_out.f_hat[k] - (dt / sqrt_t) * denoiser_out.eps_hat[k];
        out[k] = mean + stddev * noise[k];
    }
    return out;
}

DenoiserOutput gaussian_oracle_denoiser(const std::vector<double>& x_t, double t, double mu0,
                                        double var0) {
    if (!(t > 0.0) || !(t <= 1.0))
        fail(Errc::TimeOutOfRange, "gaussian_oracle_denoiser: t outside (0,1]");
    if (var0 < 0.0)
        fail(Errc::InvalidArgument, "gaussian_oracle_denoiser: negative var0");
    const double g = 1.0 - t;
    const double gain = g * var0 / (g * g * var0 + t);
    const double inv_sqrt_t = 1.0 / std::sqrt(t);
    DenoiserOutput out;
    out.f_hat.resize(x_t.size());
    out.eps_hat.resize(x_t.size());
    for (std::size_t k = 0; k < x_t.size(); ++k) {
        const double x0_hat = mu0 + gain * (x_t[k] - g * mu0);
        out.f_hat[k] = -x0_hat;
        out.eps_hat[k] = (x_t[k] - g * x0_hat) * inv_sqrt_t;
    }
    return out;
}

std::vector<double> reverse_sde_step(const std::vector<double>& x, double t, double dt,
                                     const DriftFn& drift_f, const DiffusionFn& diffusion_g,
                                     const ScoreFn& score, const std::vector<double>& noise) {
    if (!(dt > 0.0))
        fail(Errc::BadTimeStep, "reverse_sde_step: dt must be positive");
    require_same_size(x, noise, "reverse_sde_step noise");
    const std::vector<double> f = drift_f(x, t);
    const std::vector<double> s = score(x, t);
    require_same_size(x, f, "reverse_sde_step drift");
    require_same_size(x, s, "reverse_sde_step score");
    const double g = diffusion_g(t);
    const double g_sq = g * g;
    const double g_sqrt_dt = g * std::sqrt(dt);
    std::vector<double> out(x.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = x[k] - (f[k] - g_sq * s[k]) * dt + g_sqrt_dt * noise[k];
    return out;
}

std::vector<double> pf_ode_step(const std::vector<double>& x, double t, double dt,
                                const DriftFn& drift_f, const DiffusionFn& diffusion_g,
                                const ScoreFn& score) {
    if (!(dt > 0.0))
        fail(Errc::BadTimeStep, "pf_ode_step: dt must be positive");
    const std::vector<double> f = drift_f(x, t);
    const std::vector<double> s = score(x, t);
    require_same_size(x, f, "pf_ode_step drift");
    require_same_size(x, s, "pf_ode_step score");
    const double g = diffusion_g(t);
    const double half_g_sq = 0.5 * g * g;
    std::vector<double> out(x.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = x[k] - (f[k] - half_g_sq * s[k]) * dt;
    return out;
}

namespace {

double mean_sq_diff(const std::vector<double>& a, const std::vector<double>& b,
                    const char* what) {
    require_same_size(a, b, what);
    if (a.empty())
        fail(Errc::InvalidArgument, std::string(what) + ": empty vectors");
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return acc / double(a.size());
}

} // namespace

double loss_drift(const std::vector<double>& f_hat, const std::vector<double>& x0) {
    // Target drift is -x0, so the residual is f_hat + x0.
    require_same_size(f_hat, x0, "loss_drift");
    if (f_hat.empty())
        fail(Errc::InvalidArgument, "loss_drift: empty vectors");
    double acc = 0.0;
    for (std::size_t k = 0; k < f_hat.size(); ++k) {
        const double d = f_hat[k] + x0[k];
        acc += d * d;
    }
    return acc / double(f_hat.size());
}

double loss_noise(const std::vector<double>& eps_hat, const std::vector<double>& eps) {
    return mean_sq_diff(eps_hat, eps, "loss_noise");
}

double loss_recon(const std::vector<double>& z0_hat, const std::vector<double>& z0) {
    return mean_sq_diff(z0_hat, z0, "loss_recon");
}

double loss_total(double ld, double ln, double lr, const LossWeights& weights) {
    weights.validate();
    if (ld < 0.0 || ln < 0.0 || lr < 0.0)
        fail(Errc::InvalidArgument, "loss_total: negative component loss");
    return weights.lambda1 * ld + weights.lambda2 * ln + weights.lambda3 * lr;
}

double vae_loss(double recon_sq_err, const std::vector<double>& mu,
                const std::vector<double>& logvar) {
    require_same_size(mu, logvar, "vae_loss");
    require_finite(logvar, "vae_loss logvar");
    require_finite(mu, "vae_loss mu");
    double kl = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k)
        kl += mu[k] * mu[k] + std::exp(logvar[k]) - 1.0 - logvar[k];
    return recon_sq_err + 0.5 * kl;
}

} // namespace rmsup
