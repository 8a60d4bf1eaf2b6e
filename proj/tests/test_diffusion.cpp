#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "rmsup/diffusion.hpp"
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

std::vector<double> normals(SplitMix64& rng, std::size_t n) {
    std::vector<double> out(n);
    for (double& v : out) v = rng.next_normal();
    return out;
}

double sample_mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / double(v.size());
}

double sample_var(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / double(v.size());
}

const DriftFn kZeroDrift = [](const std::vector<double>& x, double) {
    return std::vector<double>(x.size(), 0.0);
};
const DiffusionFn kUnitG = [](double) { return 1.0; };
const ScoreFn kNegXScore = [](const std::vector<double>& x, double) {
    std::vector<double> s(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) s[k] = -x[k];
    return s;
};

} // namespace

TEST_SUITE("diffusion") {

TEST_CASE("constant-drift schedule exposes gamma and delta_sq on [0,1]") {
    const Schedule s = Schedule::constant_drift_ddm();
    CHECK(s.gamma(0.0) == 1.0);
    CHECK(s.gamma(0.3) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(s.delta_sq(0.3) == 0.3);
    CHECK(s.delta_sq(1.0) == 1.0);
    CHECK(code_of([&] { s.gamma(-0.1); }) == Errc::TimeOutOfRange);
    CHECK(code_of([&] { s.delta_sq(1.5); }) == Errc::TimeOutOfRange);
    CHECK(code_of([&] { s.steps(); }) == Errc::KindMismatch);
}

TEST_CASE("ddpm_from_betas builds alpha and the cumulative product") {
    const Schedule s = Schedule::ddpm_from_betas({0.1, 0.2, 0.3});
    CHECK(s.steps() == 3);
    CHECK(s.alpha[0] == doctest::Approx(std::sqrt(0.9)).epsilon(1e-15));
    CHECK(s.alpha[2] == doctest::Approx(std::sqrt(0.7)).epsilon(1e-15));
    CHECK(s.abar[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(s.abar[1] == doctest::Approx(0.72).epsilon(1e-15));
    CHECK(s.abar[2] == doctest::Approx(0.504).epsilon(1e-15));
    CHECK(code_of([&] { s.gamma(0.5); }) == Errc::KindMismatch);

    CHECK(code_of([] { Schedule::ddpm_from_betas({}); }) == Errc::InvalidArgument);
    CHECK(code_of([] { Schedule::ddpm_from_betas({0.0}); }) == Errc::InvalidArgument);
    CHECK(code_of([] { Schedule::ddpm_from_betas({1.0}); }) == Errc::InvalidArgument);
    CHECK(code_of([] { Schedule::ddpm_from_betas({0.5, -0.1}); }) == Errc::InvalidArgument);
}

TEST_CASE("externally supplied ddpm arrays must have a consistent abar") {
    // alpha_k = 1 with beta in range is acceptable: abar stays 1 and the
    // forward step is a pure noise injection.
    const Schedule s = Schedule::ddpm({1.0}, {0.5}, {1.0});
    const auto out = ddpm_forward_step({0.0, 2.0}, 0, s, {1.0, -1.0});
    CHECK(out[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(2.0 - std::sqrt(0.5)).epsilon(1e-15));

    CHECK(code_of([] { Schedule::ddpm({0.9}, {0.19}, {0.9}); }) == Errc::InvalidArgument);
    CHECK(code_of([] { Schedule::ddpm({}, {}, {}); }) == Errc::DimensionMismatch);
    CHECK(code_of([] { Schedule::ddpm({0.9, 0.8}, {0.19}, {0.81}); }) ==
          Errc::DimensionMismatch);
}

TEST_CASE("ddpm forward step applies the per-step attenuation and noise gain") {
    const Schedule s = Schedule::ddpm_from_betas({0.1, 0.2, 0.3});
    const std::vector<double> x = {1.0, -2.0, 0.5};
    const std::vector<double> n = {0.25, 0.0, -1.0};
    const auto out = ddpm_forward_step(x, 1, s, n);
    for (std::size_t k = 0; k < x.size(); ++k)
        CHECK(out[k] ==
              doctest::Approx(std::sqrt(0.8) * x[k] + std::sqrt(0.2) * n[k]).epsilon(1e-15));

    CHECK(code_of([&] { ddpm_forward_step(x, -1, s, n); }) == Errc::InvalidArgument);
    CHECK(code_of([&] { ddpm_forward_step(x, 3, s, n); }) == Errc::InvalidArgument);
    CHECK(code_of([&] { ddpm_forward_step(x, 0, s, {1.0}); }) == Errc::DimensionMismatch);
    CHECK(code_of([&] {
              ddpm_forward_step(x, 0, Schedule::constant_drift_ddm(), n);
          }) == Errc::KindMismatch);
}

TEST_CASE("ddpm forward step has the predicted moments") {
    const Schedule s = Schedule::ddpm_from_betas({0.36}); // alpha = 0.8 exactly
    const std::size_t n = 100000;
    SplitMix64 rng(501);
    const auto out = ddpm_forward_step(std::vector<double>(n, 0.5), 0, s, normals(rng, n));
    // mean 0.8 * 0.5, variance 0.36; allow 4 standard errors.
    CHECK(std::abs(sample_mean(out) - 0.4) < 4.0 * 0.6 / std::sqrt(double(n)));
    CHECK(std::abs(sample_var(out) - 0.36) < 4.0 * 0.36 * std::sqrt(2.0 / double(n - 1)));
}

TEST_CASE("constant-drift forward sample matches its closed form") {
    const std::vector<double> x0 = {1.0, -0.5, 2.0};
    const std::vector<double> eps = {0.5, 1.0, -2.0};
    const auto out = ddm_forward_sample(x0, 0.25, eps);
    for (std::size_t k = 0; k < x0.size(); ++k)
        CHECK(out[k] == doctest::Approx(0.75 * x0[k] + 0.5 * eps[k]).epsilon(1e-15));

    // Endpoints are exact: t = 0 returns x0, t = 1 returns the noise.
    CHECK(ddm_forward_sample(x0, 0.0, eps) == x0);
    CHECK(ddm_forward_sample(x0, 1.0, eps) == eps);

    CHECK(code_of([&] { ddm_forward_sample(x0, -0.01, eps); }) == Errc::TimeOutOfRange);
    CHECK(code_of([&] { ddm_forward_sample(x0, 1.01, eps); }) == Errc::TimeOutOfRange);
    CHECK(code_of([&] { ddm_forward_sample(x0, 0.5, {1.0}); }) == Errc::DimensionMismatch);
}

TEST_CASE("forward-sample moments match the marginal law") {
    const double mu0 = 0.4, sd0 = 0.3, t = 0.36;
    const std::size_t n = 50000;
    SplitMix64 rng(77);
    std::vector<double> x0(n);
    for (double& v : x0) v = mu0 + sd0 * rng.next_normal();
    const auto xt = ddm_forward_sample(x0, t, normals(rng, n));
    const double want_mean = (1.0 - t) * mu0;
    const double want_var = (1.0 - t) * (1.0 - t) * sd0 * sd0 + t;
    CHECK(std::abs(sample_mean(xt) - want_mean) <
          4.0 * std::sqrt(want_var / double(n)));
    CHECK(std::abs(sample_var(xt) - want_var) <
          4.0 * want_var * std::sqrt(2.0 / double(n - 1)));
}

TEST_CASE("reverse step arithmetic on a hand-worked example") {
    // x_t = 2, t = 0.5, dt = 0.25, f_hat = -1, eps_hat = 0.5, noise = 1:
    //   mean   = 2 + 0.25 - 0.125 * sqrt(2)
    //   stddev = sqrt(0.125) = 0.25 * sqrt(2)
    //   out    = 2.25 + 0.125 * sqrt(2)
    DenoiserOutput d;
    d.f_hat = {-1.0};
    d.eps_hat = {0.5};
    const auto out = ddm_reverse_step({2.0}, 0.5, 0.25, d, {1.0});
    CHECK(out[0] == doctest::Approx(2.25 + 0.125 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("the final reverse step is deterministic") {
    DenoiserOutput d;
    d.f_hat = {0.5};
    d.eps_hat = {-0.25};
    // dt = t makes the noise coefficient exactly zero, so even an enormous
    // noise draw cannot perturb the output.
    const auto a = ddm_reverse_step({1.0}, 0.5, 0.5, d, {1e300});
    const auto b = ddm_reverse_step({1.0}, 0.5, 0.5, d, {0.0});
    CHECK(a[0] == b[0]);
}

TEST_CASE("a fully informed denoiser recovers x0 in one jump") {
    SplitMix64 rng(13);
    std::vector<double> x0(64);
    for (double& v : x0) v = rng.next_range(-2.0, 2.0);
    const std::vector<double> eps = normals(rng, x0.size());

    const double t = 0.7;
    const auto x_t = ddm_forward_sample(x0, t, eps);
    DenoiserOutput d;
    d.f_hat.resize(x0.size());
    for (std::size_t k = 0; k < x0.size(); ++k) d.f_hat[k] = -x0[k];
    d.eps_hat = eps;

    // mean = x_t + t*x0 - sqrt(t)*eps = (1-t)x0 + t*x0 = x0 when dt = t.
    const auto back = ddm_reverse_step(x_t, t, t, d, std::vector<double>(x0.size(), 0.0));
    for (std::size_t k = 0; k < x0.size(); ++k)
        CHECK(back[k] == doctest::Approx(x0[k]).epsilon(1e-13));
}

TEST_CASE("reverse step validates the time window and sizes") {
    DenoiserOutput d;
    d.f_hat = {0.0};
    d.eps_hat = {0.0};
    const std::vector<double> x = {1.0}, n = {0.0};
    CHECK(code_of([&] { ddm_reverse_step(x, 0.5, 0.0, d, n); }) == Errc::BadTimeStep);
    CHECK(code_of([&] { ddm_reverse_step(x, 0.5, 0.6, d, n); }) == Errc::BadTimeStep);
    CHECK(code_of([&] { ddm_reverse_step(x, 1.2, 0.1, d, n); }) == Errc::BadTimeStep);
    CHECK(code_of([&] { ddm_reverse_step(x, 0.5, 0.25, d, {}); }) == Errc::DimensionMismatch);
    DenoiserOutput bad = d;
    bad.eps_hat = {0.0, 0.0};
    CHECK(code_of([&] { ddm_reverse_step(x, 0.5, 0.25, bad, n); }) == Errc::DimensionMismatch);
}

TEST_CASE("gaussian oracle denoiser computes the posterior mean") {
    // mu0 = 2, var0 = 4, t = 0.5, x_t = 3:
    //   gain   = (0.5 * 4) / (0.25 * 4 + 0.5) = 4/3
    //   x0_hat = 2 + (4/3) * (3 - 1) = 14/3
    const auto d = gaussian_oracle_denoiser({3.0}, 0.5, 2.0, 4.0);
    CHECK(d.f_hat[0] == doctest::Approx(-14.0 / 3.0).epsilon(1e-14));
    // eps_hat = (3 - 0.5 * 14/3) * sqrt(2) = (2/3) * sqrt(2)
    CHECK(d.eps_hat[0] == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-14));

    // Zero prior variance pins the posterior at mu0 regardless of x_t.
    const auto pinned = gaussian_oracle_denoiser({123.0, -8.0}, 0.25, 1.5, 0.0);
    CHECK(pinned.f_hat[0] == -1.5);
    CHECK(pinned.f_hat[1] == -1.5);
    CHECK(pinned.eps_hat[0] == doctest::Approx((123.0 - 0.75 * 1.5) / 0.5).epsilon(1e-14));

    CHECK(code_of([] { gaussian_oracle_denoiser({1.0}, 0.0, 0.0, 1.0); }) ==
          Errc::TimeOutOfRange);
    CHECK(code_of([] { gaussian_oracle_denoiser({1.0}, 0.5, 0.0, -1.0); }) ==
          Errc::InvalidArgument);
}

TEST_CASE("the oracle's eps_hat encodes the exact marginal score") {
    // For x_t ~ N((1-t) mu0, (1-t)^2 var0 + t) the score is
    // -(x_t - (1-t) mu0) / ((1-t)^2 var0 + t), and -eps_hat / sqrt(t)
    // must reproduce it at every point.
    const double mu0 = 0.8, var0 = 2.5;
    for (double t : {0.1, 0.5, 0.9, 1.0}) {
        std::vector<double> xs;
        for (double x = -3.0; x <= 3.0; x += 0.75) xs.push_back(x);
        const auto d = gaussian_oracle_denoiser(xs, t, mu0, var0);
        const double g = 1.0 - t;
        const double marg_var = g * g * var0 + t;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double want = -(xs[k] - g * mu0) / marg_var;
            CHECK(-d.eps_hat[k] / std::sqrt(t) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("score_from_eps rescales by the marginal noise level") {
    const auto s = score_from_eps({1.0, -0.5}, 0.75);
    CHECK(s[0] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(s[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(code_of([] { score_from_eps({1.0}, 0.0); }) == Errc::DegenerateAlphaBar);
    CHECK(code_of([] { score_from_eps({1.0}, 1.0); }) == Errc::DegenerateAlphaBar);
}

TEST_CASE("exact noise gives the analytic ddpm score") {
    SplitMix64 rng(99);
    const double abar = 0.6;
    std::vector<double> x0(128);
    for (double& v : x0) v = rng.next_range(-1.0, 1.0);
    const auto eps = normals(rng, x0.size());

    std::vector<double> x_t(x0.size());
    for (std::size_t k = 0; k < x0.size(); ++k)
        x_t[k] = std::sqrt(abar) * x0[k] + std::sqrt(1.0 - abar) * eps[k];

    const auto got = score_from_eps(eps, abar);
    for (std::size_t k = 0; k < x0.size(); ++k) {
        const double want = -(x_t[k] - std::sqrt(abar) * x0[k]) / (1.0 - abar);
        CHECK(got[k] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("single sde and ode steps on hand-worked numbers") {
    const DriftFn f = [](const std::vector<double>& x, double) {
        std::vector<double> out(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) out[k] = -0.5 * x[k];
        return out;
    };
    const DiffusionFn g = [](double t) { return std::sqrt(t); };

    // x = 1, t = 0.64, dt = 0.04, noise = 0.5:
    //   sde: 1 - (-0.5 + 0.64) * 0.04 + 0.8 * 0.2 * 0.5 = 1.0744
    //   ode: 1 - (-0.5 + 0.32) * 0.04                   = 1.0072
    const auto sde = reverse_sde_step({1.0}, 0.64, 0.04, f, g, kNegXScore, {0.5});
    CHECK(sde[0] == doctest::Approx(1.0744).epsilon(1e-14));
    const auto ode = pf_ode_step({1.0}, 0.64, 0.04, f, g, kNegXScore);
    CHECK(ode[0] == doctest::Approx(1.0072).epsilon(1e-14));

    CHECK(code_of([&] {
              reverse_sde_step({1.0}, 0.5, 0.0, f, g, kNegXScore, {0.0});
          }) == Errc::BadTimeStep);
    CHECK(code_of([&] {
              reverse_sde_step({1.0}, 0.5, 0.1, f, g, kNegXScore, {0.0, 0.0});
          }) == Errc::DimensionMismatch);
    CHECK(code_of([&] { pf_ode_step({1.0}, 0.5, -0.1, f, g, kNegXScore); }) ==
          Errc::BadTimeStep);
    CHECK(code_of([&] { pf_ode_step({1.0}, 0.5, 0.1, kZeroDrift, g, [](const auto&, double) {
                            return std::vector<double>{1.0, 2.0};
                        }); }) == Errc::DimensionMismatch);
}

TEST_CASE("iterated sde steps reach the fixed point's stationary variance") {
    // With drift 0, unit diffusion, and score -x the update is
    // x' = (1 - dt) x + sqrt(dt) n, whose stationary variance is
    // dt / (1 - (1 - dt)^2) = 1 / (2 - dt).
    const std::size_t chains = 20000;
    const double dt = 0.01;
    const int steps = 800;
    SplitMix64 rng(31);

    std::vector<double> x(chains, 0.0);
    for (int k = 0; k < steps; ++k)
        x = reverse_sde_step(x, 1.0, dt, kZeroDrift, kUnitG, kNegXScore, normals(rng, chains));
    const double want = 1.0 / (2.0 - dt);
    CHECK(std::abs(sample_mean(x)) < 4.0 * std::sqrt(want / double(chains)));
    CHECK(std::abs(sample_var(x) - want) < 4.0 * want * std::sqrt(2.0 / double(chains - 1)));

    // Matching the score to the drift (f = -x/2) moves the stationary
    // variance to 1 / (1 - dt/4), i.e. unit variance as dt -> 0.
    const DriftFn half = [](const std::vector<double>& v, double) {
        std::vector<double> out(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) out[k] = -0.5 * v[k];
        return out;
    };
    std::vector<double> y(chains, 0.0);
    for (int k = 0; k < steps; ++k)
        y = reverse_sde_step(y, 1.0, dt, half, kUnitG, kNegXScore, normals(rng, chains));
    const double want2 = 1.0 / (1.0 - 0.25 * dt);
    CHECK(std::abs(sample_var(y) - want2) < 4.0 * want2 * std::sqrt(2.0 / double(chains - 1)));
}

TEST_CASE("the probability-flow ode transports quantiles exactly") {
    // For marginals N(0, v0 + t) the score is -x / (v0 + t); the flow map
    // from t = 1 to t = 0 contracts every point by sqrt(v0 / (v0 + 1)).
    const double v0 = 1.0;
    const ScoreFn score = [&](const std::vector<double>& x, double t) {
        std::vector<double> out(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) out[k] = -x[k] / (v0 + t);
        return out;
    };
    const double dt = 1e-3;
    std::vector<double> x = {std::sqrt(2.0)};
    for (int k = 0; k < 1000; ++k) {
        const double t = 1.0 - k * dt;
        x = pf_ode_step(x, t, dt, kZeroDrift, kUnitG, score);
    }
    CHECK(x[0] == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(x[0] < std::sqrt(2.0));
}

TEST_CASE("training losses match their formulas") {
    CHECK(loss_drift({1.0, 2.0}, {-1.0, -1.0}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(loss_noise({1.0, 3.0}, {0.0, 1.0}) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(loss_recon({0.25}, {0.25}) == 0.0);

    CHECK(code_of([] { loss_drift({}, {}); }) == Errc::InvalidArgument);
    CHECK(code_of([] { loss_noise({}, {}); }) == Errc::InvalidArgument);
    CHECK(code_of([] { loss_noise({1.0}, {1.0, 2.0}); }) == Errc::DimensionMismatch);

    LossWeights w;
    w.lambda1 = 1.0;
    w.lambda2 = 2.0;
    w.lambda3 = 3.0;
    CHECK(loss_total(0.1, 0.2, 0.3, w) == doctest::Approx(1.4).epsilon(1e-15));
    CHECK(code_of([&] { loss_total(-0.1, 0.2, 0.3, w); }) == Errc::InvalidArgument);
    w.lambda2 = -1.0;
    CHECK(code_of([&] { loss_total(0.1, 0.2, 0.3, w); }) == Errc::InvalidArgument);
    w = LossWeights{};
    w.lambda1 = w.lambda2 = w.lambda3 = 0.0;
    CHECK(code_of([&] { loss_total(0.1, 0.2, 0.3, w); }) == Errc::InvalidArgument);
}

TEST_CASE("the vae penalty vanishes only at the standard normal posterior") {
    CHECK(vae_loss(0.75, {0.0, 0.0}, {0.0, 0.0}) == 0.75);
    // mu = 1, logvar = 0 adds 0.5 * (1 + 1 - 1 - 0) = 0.5.
    CHECK(vae_loss(0.25, {1.0}, {0.0}) == doctest::Approx(0.75).epsilon(1e-15));

    SplitMix64 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const auto mu = normals(rng, 6);
        const auto logvar = normals(rng, 6);
        CHECK(vae_loss(0.0, mu, logvar) >= 0.0);
    }
    CHECK(code_of([] { vae_loss(0.0, {1.0}, {1.0, 2.0}); }) == Errc::DimensionMismatch);
}

TEST_CASE("diffusion states validate against their schedule") {
    const Schedule ddm = Schedule::constant_drift_ddm();
    const Schedule ddpm = Schedule::ddpm_from_betas({0.1, 0.1, 0.1});

    DiffusionState s;
    s.x = {0.5, 1.0};
    s.t = 0.5;
    CHECK_NOTHROW(s.validate(ddm));
    s.t = 1.5;
    CHECK(code_of([&] { s.validate(ddm); }) == Errc::TimeOutOfRange);

    s.t = 1.0;
    CHECK_NOTHROW(s.validate(ddpm));
    s.t = 0.5; // DDPM times must be whole step indices
    CHECK(code_of([&] { s.validate(ddpm); }) == Errc::TimeOutOfRange);
    s.t = 3.0;
    CHECK(code_of([&] { s.validate(ddpm); }) == Errc::TimeOutOfRange);

    s.t = 0.0;
    s.x = {std::nan("")};
    CHECK(code_of([&] { s.validate(ddm); }) == Errc::InvalidArgument);
}

} // TEST_SUITE("diffusion")
