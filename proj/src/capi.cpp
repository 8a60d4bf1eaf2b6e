#include "rmsup/rmsup.h"

#include <cstring>
#include <string>
#include <vector>

#include "rmsup/diffusion.hpp"
#include "rmsup/eval.hpp"
#include "rmsup/helm_edge.hpp"
#include "rmsup/pipeline.hpp"
#include "rmsup/resample.hpp"

using namespace rmsup;

struct rmsup_grid {
    Grid2D g;
};

namespace {

thread_local std::string t_last_error;

rmsup_status map_errc(Errc code) {
    switch (code) {
    case Errc::Ok: return RMSUP_OK;
    case Errc::InvalidArgument: return RMSUP_ERR_INVALID_ARGUMENT;
    case Errc::BadMagic: return RMSUP_ERR_BAD_MAGIC;
    case Errc::TruncatedFile: return RMSUP_ERR_TRUNCATED_FILE;
    case Errc::DimensionMismatch: return RMSUP_ERR_DIMENSION_MISMATCH;
    case Errc::ValueOutOfRange: return RMSUP_ERR_VALUE_OUT_OF_RANGE;
    case Errc::GridTooSmall: return RMSUP_ERR_GRID_TOO_SMALL;
    case Errc::NegativePower: return RMSUP_ERR_NEGATIVE_POWER;
    case Errc::BadThresholds: return RMSUP_ERR_BAD_THRESHOLDS;
    case Errc::IndivisibleStride: return RMSUP_ERR_INDIVISIBLE_STRIDE;
    case Errc::SourceTooSmall: return RMSUP_ERR_SOURCE_TOO_SMALL;
    case Errc::PlacementFailure: return RMSUP_ERR_PLACEMENT_FAILURE;
    case Errc::KindMismatch: return RMSUP_ERR_KIND_MISMATCH;
    case Errc::TimeOutOfRange: return RMSUP_ERR_TIME_OUT_OF_RANGE;
    case Errc::BadTimeStep: return RMSUP_ERR_BAD_TIME_STEP;
    case Errc::DegenerateAlphaBar: return RMSUP_ERR_DEGENERATE_ALPHA_BAR;
    case Errc::ZeroReference: return RMSUP_ERR_ZERO_REFERENCE;
    case Errc::MomentCheckFailed: return RMSUP_ERR_MOMENT_CHECK_FAILED;
    case Errc::Io: return RMSUP_ERR_IO;
    case Errc::Config: return RMSUP_ERR_CONFIG;
    }
    return RMSUP_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes + the thread-local
// message.
template <typename Fn>
rmsup_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return RMSUP_OK;
    } catch (const Error& e) {
        t_last_error = e.what();
        return map_errc(e.code());
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return RMSUP_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown error";
        return RMSUP_ERR_INTERNAL;
    }
}

rmsup_status require(bool ok, const char* msg) {
    if (ok) return RMSUP_OK;
    t_last_error = msg;
    return RMSUP_ERR_INVALID_ARGUMENT;
}

EdgeParams to_edge_params(const rmsup_edge_params* p) {
    EdgeParams out;
    if (p) {
        out.epsilon = p->epsilon;
        out.canny_sigma = p->canny_sigma;
        out.canny_low = p->canny_low;
        out.canny_high = p->canny_high;
        out.lbp_edge_threshold = p->lbp_threshold;
        out.k_sign_flip = p->k_sign_flip != 0;
    }
    return out;
}

SrConfig to_sr_config(const rmsup_sr_config* p) {
    SrConfig out;
    if (p) {
        out.lambda_data = p->lambda_data;
        out.lambda_smooth = p->lambda_smooth;
        out.lambda_helm = p->lambda_helm;
        out.k_eff = p->k_eff;
        out.edge_weight_floor = p->edge_weight_floor;
        out.max_iters = p->max_iters;
        out.grad_tol = p->grad_tol;
        out.step_rule.kind =
            p->fixed_step ? StepRule::Kind::FixedStep : StepRule::Kind::BacktrackingLineSearch;
        out.step_rule.eta = p->eta;
    }
    return out;
}

std::vector<std::string> collect_overrides(const char* const* overrides, int n_overrides) {
    std::vector<std::string> out;
    out.reserve(std::size_t(n_overrides > 0 ? n_overrides : 0));
    for (int i = 0; i < n_overrides; ++i) {
        if (!overrides || !overrides[i])
            fail(Errc::InvalidArgument, "null override string");
        out.emplace_back(overrides[i]);
    }
    return out;
}

RunConfig load_config(const char* config_path, const char* const* overrides, int n_overrides) {
    return RunConfig::load(config_path ? std::string(config_path) : std::string(),
                           collect_overrides(overrides, n_overrides));
}

rmsup_status grid_out(Grid2D&& g, rmsup_grid** out) {
    *out = new rmsup_grid{std::move(g)};
    return RMSUP_OK;
}

} // namespace

extern "C" {

const char* rmsup_status_str(rmsup_status status) {
    switch (status) {
    case RMSUP_OK: return "ok";
    case RMSUP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case RMSUP_ERR_BAD_MAGIC: return "bad_magic";
    case RMSUP_ERR_TRUNCATED_FILE: return "truncated_file";
    case RMSUP_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case RMSUP_ERR_VALUE_OUT_OF_RANGE: return "value_out_of_range";
    case RMSUP_ERR_GRID_TOO_SMALL: return "grid_too_small";
    case RMSUP_ERR_NEGATIVE_POWER: return "negative_power";
    case RMSUP_ERR_BAD_THRESHOLDS: return "bad_thresholds";
    case RMSUP_ERR_INDIVISIBLE_STRIDE: return "indivisible_stride";
    case RMSUP_ERR_SOURCE_TOO_SMALL: return "source_too_small";
    case RMSUP_ERR_PLACEMENT_FAILURE: return "placement_failure";
    case RMSUP_ERR_KIND_MISMATCH: return "kind_mismatch";
    case RMSUP_ERR_TIME_OUT_OF_RANGE: return "time_out_of_range";
    case RMSUP_ERR_BAD_TIME_STEP: return "bad_time_step";
    case RMSUP_ERR_DEGENERATE_ALPHA_BAR: return "degenerate_alpha_bar";
    case RMSUP_ERR_ZERO_REFERENCE: return "zero_reference";
    case RMSUP_ERR_MOMENT_CHECK_FAILED: return "moment_check_failed";
    case RMSUP_ERR_IO: return "io";
    case RMSUP_ERR_CONFIG: return "config";
    case RMSUP_ERR_INTERNAL: return "internal";
    }
    return "?";
}

const char* rmsup_last_error(void) { return t_last_error.c_str(); }

rmsup_status rmsup_grid_create(int width, int height, double spacing, const double* values,
                               rmsup_grid** out) {
    if (auto s = require(out && values, "rmsup_grid_create: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] {
        if (width < 1 || height < 1)
            fail(Errc::InvalidArgument, "rmsup_grid_create: nonpositive dimensions");
        std::vector<double> v(values, values + std::size_t(width) * std::size_t(height));
        grid_out(Grid2D(width, height, spacing, std::move(v)), out);
    });
}

void rmsup_grid_destroy(rmsup_grid* grid) { delete grid; }

int rmsup_grid_width(const rmsup_grid* grid) { return grid ? grid->g.width() : 0; }
int rmsup_grid_height(const rmsup_grid* grid) { return grid ? grid->g.height() : 0; }
double rmsup_grid_spacing(const rmsup_grid* grid) { return grid ? grid->g.spacing() : 0.0; }

rmsup_status rmsup_grid_values(const rmsup_grid* grid, double* out, size_t len) {
    if (auto s = require(grid && out, "rmsup_grid_values: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] {
        if (len != grid->g.size())
            fail(Errc::DimensionMismatch, "rmsup_grid_values: buffer length mismatch");
        std::memcpy(out, grid->g.vec().data(), len * sizeof(double));
    });
}

rmsup_status rmsup_grid_read(const char* path, rmsup_grid** out) {
    if (auto s = require(path && out, "rmsup_grid_read: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] { grid_out(read_rmg(path), out); });
}

rmsup_status rmsup_grid_write(const rmsup_grid* grid, const char* path) {
    if (auto s = require(grid && path, "rmsup_grid_write: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] { write_rmg(grid->g, path); });
}

rmsup_status rmsup_grid_write_pgm(const rmsup_grid* grid, const char* path) {
    if (auto s = require(grid && path, "rmsup_grid_write_pgm: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] { write_pgm(grid->g, path); });
}

void rmsup_edge_params_default(rmsup_edge_params* out) {
    if (!out) return;
    const EdgeParams d;
    out->epsilon = d.epsilon;
    out->canny_sigma = d.canny_sigma;
    out->canny_low = d.canny_low;
    out->canny_high = d.canny_high;
    out->lbp_threshold = d.lbp_edge_threshold;
    out->k_sign_flip = d.k_sign_flip ? 1 : 0;
}

rmsup_status rmsup_edge_map(const rmsup_grid* power, const char* method,
                            const rmsup_edge_params* params, rmsup_grid** out) {
    if (auto s = require(power && method && out, "rmsup_edge_map: null pointer");
        s != RMSUP_OK)
        return s;
    return guarded([&] {
        auto k = guidance_from_method(power->g, parse_guidance_method(method),
                                      to_edge_params(params));
        if (!k)
            fail(Errc::InvalidArgument, "rmsup_edge_map: method 'base' produces no edge map");
        grid_out(std::move(*k), out);
    });
}

rmsup_status rmsup_laplacian5(const rmsup_grid* grid, rmsup_grid** out) {
    if (auto s = require(grid && out, "rmsup_laplacian5: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] { grid_out(laplacian5(grid->g), out); });
}

rmsup_status rmsup_downsample(const rmsup_grid* grid, int stride, rmsup_grid** out) {
    if (auto s = require(grid && out, "rmsup_downsample: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] { grid_out(uniform_downsample(grid->g, stride), out); });
}

rmsup_status rmsup_upsample_bilinear(const rmsup_grid* grid, int out_w, int out_h,
                                     rmsup_grid** out) {
    if (auto s = require(grid && out, "rmsup_upsample_bilinear: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] { grid_out(upsample_bilinear(grid->g, out_w, out_h), out); });
}

rmsup_status rmsup_upsample_bicubic(const rmsup_grid* grid, int out_w, int out_h,
                                    rmsup_grid** out) {
    if (auto s = require(grid && out, "rmsup_upsample_bicubic: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] { grid_out(upsample_bicubic(grid->g, out_w, out_h), out); });
}

void rmsup_sr_config_default(rmsup_sr_config* out) {
    if (!out) return;
    const SrConfig d;
    out->lambda_data = d.lambda_data;
    out->lambda_smooth = d.lambda_smooth;
    out->lambda_helm = d.lambda_helm;
    out->k_eff = d.k_eff;
    out->edge_weight_floor = d.edge_weight_floor;
    out->max_iters = d.max_iters;
    out->grad_tol = d.grad_tol;
    out->fixed_step = d.step_rule.kind == StepRule::Kind::FixedStep ? 1 : 0;
    out->eta = d.step_rule.eta;
}

rmsup_status rmsup_reconstruct(const rmsup_grid* p_lr, const rmsup_grid* guidance, int stride,
                               const rmsup_sr_config* config, rmsup_grid** p_hat) {
    if (auto s = require(p_lr && p_hat, "rmsup_reconstruct: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] {
        std::optional<Grid2D> guide;
        if (guidance) guide = guidance->g;
        SrResult result = reconstruct(p_lr->g, guide, stride, to_sr_config(config));
        grid_out(std::move(result.p_hat), p_hat);
    });
}

rmsup_status rmsup_metric_rmse(const rmsup_grid* a, const rmsup_grid* b, double* out) {
    if (auto s = require(a && b && out, "rmsup_metric_rmse: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] { *out = rmse(a->g, b->g); });
}

rmsup_status rmsup_metric_nmse(const rmsup_grid* a, const rmsup_grid* b, double* out) {
    if (auto s = require(a && b && out, "rmsup_metric_nmse: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] { *out = nmse(a->g, b->g); });
}

rmsup_status rmsup_metric_psnr(const rmsup_grid* a, const rmsup_grid* b, double max_val,
                               double* out) {
    if (auto s = require(a && b && out, "rmsup_metric_psnr: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] { *out = psnr(a->g, b->g, max_val); });
}

rmsup_status rmsup_metric_ssim(const rmsup_grid* a, const rmsup_grid* b, double* out) {
    if (auto s = require(a && b && out, "rmsup_metric_ssim: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] { *out = ssim(a->g, b->g); });
}

rmsup_status rmsup_metric_iou(const rmsup_grid* a, const rmsup_grid* b, double threshold,
                              double* out) {
    if (auto s = require(a && b && out, "rmsup_metric_iou: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] { *out = iou(a->g, b->g, threshold); });
}

rmsup_status rmsup_ddm_forward_sample(const double* x0, size_t n, double t,
                                      const double* noise, double* out) {
    if (auto s = require(x0 && noise && out, "rmsup_ddm_forward_sample: null pointer");
        s != RMSUP_OK)
        return s;
    return guarded([&] {
        auto r = ddm_forward_sample(std::vector<double>(x0, x0 + n), t,
                                    std::vector<double>(noise, noise + n));
        std::memcpy(out, r.data(), n * sizeof(double));
    });
}

rmsup_status rmsup_ddm_reverse_step(const double* x_t, size_t n, double t, double dt,
                                    const double* f_hat, const double* eps_hat,
                                    const double* noise, double* out) {
    if (auto s = require(x_t && f_hat && eps_hat && noise && out,
                         "rmsup_ddm_reverse_step: null pointer");
        s != RMSUP_OK)
        return s;
    return guarded([&] {
        DenoiserOutput den{std::vector<double>(f_hat, f_hat + n),
                           std::vector<double>(eps_hat, eps_hat + n)};
        auto r = ddm_reverse_step(std::vector<double>(x_t, x_t + n), t, dt, den,
                                  std::vector<double>(noise, noise + n));
        std::memcpy(out, r.data(), n * sizeof(double));
    });
}

rmsup_status rmsup_gaussian_oracle_denoiser(const double* x_t, size_t n, double t, double mu0,
                                            double var0, double* f_hat, double* eps_hat) {
    if (auto s = require(x_t && f_hat && eps_hat,
                         "rmsup_gaussian_oracle_denoiser: null pointer");
        s != RMSUP_OK)
        return s;
    return guarded([&] {
        DenoiserOutput den =
            gaussian_oracle_denoiser(std::vector<double>(x_t, x_t + n), t, mu0, var0);
        std::memcpy(f_hat, den.f_hat.data(), n * sizeof(double));
        std::memcpy(eps_hat, den.eps_hat.data(), n * sizeof(double));
    });
}

rmsup_status rmsup_score_from_eps(const double* eps_hat, size_t n, double abar_t,
                                  double* out) {
    if (auto s = require(eps_hat && out, "rmsup_score_from_eps: null pointer"); s != RMSUP_OK)
        return s;
    return guarded([&] {
        auto r = score_from_eps(std::vector<double>(eps_hat, eps_hat + n), abar_t);
        std::memcpy(out, r.data(), n * sizeof(double));
    });
}

rmsup_status rmsup_cmd_gen(const char* config_path, const char* const* overrides,
                           int n_overrides) {
    return guarded([&] { cmd_gen(load_config(config_path, overrides, n_overrides)); });
}

rmsup_status rmsup_cmd_edge(const char* config_path, const char* const* overrides,
                            int n_overrides) {
    return guarded([&] { cmd_edge(load_config(config_path, overrides, n_overrides)); });
}

rmsup_status rmsup_cmd_down(const char* config_path, const char* const* overrides,
                            int n_overrides) {
    return guarded([&] { cmd_down(load_config(config_path, overrides, n_overrides)); });
}

rmsup_status rmsup_cmd_sr(const char* config_path, const char* const* overrides,
                          int n_overrides) {
    return guarded([&] { cmd_sr(load_config(config_path, overrides, n_overrides)); });
}

rmsup_status rmsup_cmd_ddm_demo(const char* config_path, const char* const* overrides,
                                int n_overrides) {
    return guarded([&] { cmd_ddm_demo(load_config(config_path, overrides, n_overrides)); });
}

rmsup_status rmsup_cmd_eval(const char* config_path, const char* const* overrides,
                            int n_overrides, int* n_failed) {
    return guarded([&] {
        const ComparisonReport report =
            cmd_eval(load_config(config_path, overrides, n_overrides));
        if (n_failed) {
            int failed = 0;
            for (const EvalRow& row : report.rows) failed += row.failed ? 1 : 0;
            *n_failed = failed;
        }
    });
}

rmsup_status rmsup_cmd_pipeline(const char* config_path, const char* const* overrides,
                                int n_overrides, int* n_failed) {
    return guarded([&] {
        const ComparisonReport report =
            cmd_pipeline(load_config(config_path, overrides, n_overrides));
        if (n_failed) {
            int failed = 0;
            for (const EvalRow& row : report.rows) failed += row.failed ? 1 : 0;
            *n_failed = failed;
        }
    });
}

} // extern "C"
