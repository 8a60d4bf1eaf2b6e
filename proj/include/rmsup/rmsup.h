/* Public C interface of the radio-map super-resolution library.
 *
 * Grids travel as opaque handles created/destroyed here; every call returns
 * an rmsup_status and leaves a human-readable message for the calling thread
 * in rmsup_last_error() on failure. Array-based diffusion kernels operate on
 * caller-owned buffers. The rmsup_cmd_* entry points run the full CLI
 * commands from a config file plus "key=value" override strings.
 */
#ifndef RMSUP_H
#define RMSUP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rmsup_status {
    RMSUP_OK = 0,
    RMSUP_ERR_INVALID_ARGUMENT,
    RMSUP_ERR_BAD_MAGIC,
    RMSUP_ERR_TRUNCATED_FILE,
    RMSUP_ERR_DIMENSION_MISMATCH,
    RMSUP_ERR_VALUE_OUT_OF_RANGE,
    RMSUP_ERR_GRID_TOO_SMALL,
    RMSUP_ERR_NEGATIVE_POWER,
    RMSUP_ERR_BAD_THRESHOLDS,
    RMSUP_ERR_INDIVISIBLE_STRIDE,
    RMSUP_ERR_SOURCE_TOO_SMALL,
    RMSUP_ERR_PLACEMENT_FAILURE,
    RMSUP_ERR_KIND_MISMATCH,
    RMSUP_ERR_TIME_OUT_OF_RANGE,
    RMSUP_ERR_BAD_TIME_STEP,
    RMSUP_ERR_DEGENERATE_ALPHA_BAR,
    RMSUP_ERR_ZERO_REFERENCE,
    RMSUP_ERR_MOMENT_CHECK_FAILED,
    RMSUP_ERR_IO,
    RMSUP_ERR_CONFIG,
    RMSUP_ERR_INTERNAL
} rmsup_status;

/* Stable name for a status code (e.g. "invalid_argument"). */
const char* rmsup_status_str(rmsup_status status);

/* Message of the current thread's most recent failure; "" after success. */
const char* rmsup_last_error(void);

/* ---- grids ---- */

typedef struct rmsup_grid rmsup_grid;

rmsup_status rmsup_grid_create(int width, int height, double spacing,
                               const double* values, rmsup_grid** out);
void rmsup_grid_destroy(rmsup_grid* grid);

int rmsup_grid_width(const rmsup_grid* grid);
int rmsup_grid_height(const rmsup_grid* grid);
double rmsup_grid_spacing(const rmsup_grid* grid);
/* Copies width*height values row-major into `out` (len must match). */
rmsup_status rmsup_grid_values(const rmsup_grid* grid, double* out, size_t len);

rmsup_status rmsup_grid_read(const char* path, rmsup_grid** out);
rmsup_status rmsup_grid_write(const rmsup_grid* grid, const char* path);
rmsup_status rmsup_grid_write_pgm(const rmsup_grid* grid, const char* path);

/* ---- edge extraction ---- */

typedef struct rmsup_edge_params {
    double epsilon;       /* amplitude stabilizer */
    double canny_sigma;
    double canny_low;
    double canny_high;
    int lbp_threshold;
    int k_sign_flip;      /* nonzero: mark positive curvature instead */
} rmsup_edge_params;

void rmsup_edge_params_default(rmsup_edge_params* out);

/* Edge map (values 0/1) of a [0,1] power grid. method is one of
 * "kedge", "lbp", "canny". params may be NULL for defaults. */
rmsup_status rmsup_edge_map(const rmsup_grid* power, const char* method,
                            const rmsup_edge_params* params, rmsup_grid** out);

/* Replicate-padded 5-point Laplacian divided by spacing^2. */
rmsup_status rmsup_laplacian5(const rmsup_grid* grid, rmsup_grid** out);

/* ---- resampling ---- */

rmsup_status rmsup_downsample(const rmsup_grid* grid, int stride, rmsup_grid** out);
rmsup_status rmsup_upsample_bilinear(const rmsup_grid* grid, int out_w, int out_h,
                                     rmsup_grid** out);
rmsup_status rmsup_upsample_bicubic(const rmsup_grid* grid, int out_w, int out_h,
                                    rmsup_grid** out);

/* ---- variational super-resolution ---- */

typedef struct rmsup_sr_config {
    double lambda_data;
    double lambda_smooth;
    double lambda_helm;
    double k_eff;
    double edge_weight_floor;
    int max_iters;
    double grad_tol;
    int fixed_step;  /* nonzero: fixed step of length eta instead of line search */
    double eta;
} rmsup_sr_config;

void rmsup_sr_config_default(rmsup_sr_config* out);

/* Reconstructs an upscaled [0,1] power map from a low-resolution one.
 * guidance (an edge map in [0,1], any compatible size) may be NULL;
 * config may be NULL for defaults. */
rmsup_status rmsup_reconstruct(const rmsup_grid* p_lr, const rmsup_grid* guidance,
                               int stride, const rmsup_sr_config* config,
                               rmsup_grid** p_hat);

/* ---- metrics ---- */

rmsup_status rmsup_metric_rmse(const rmsup_grid* a, const rmsup_grid* b, double* out);
rmsup_status rmsup_metric_nmse(const rmsup_grid* a, const rmsup_grid* b, double* out);
rmsup_status rmsup_metric_psnr(const rmsup_grid* a, const rmsup_grid* b, double max_val,
                               double* out);
rmsup_status rmsup_metric_ssim(const rmsup_grid* a, const rmsup_grid* b, double* out);
rmsup_status rmsup_metric_iou(const rmsup_grid* a, const rmsup_grid* b, double threshold,
                              double* out);

/* ---- diffusion kernels (caller-owned arrays of length n) ---- */

/* x_t = (1-t) x0 + sqrt(t) noise */
rmsup_status rmsup_ddm_forward_sample(const double* x0, size_t n, double t,
                                      const double* noise, double* out);

/* One reverse step from t to t-dt given denoiser outputs. */
rmsup_status rmsup_ddm_reverse_step(const double* x_t, size_t n, double t, double dt,
                                    const double* f_hat, const double* eps_hat,
                                    const double* noise, double* out);

/* Posterior-mean denoiser for iid N(mu0, var0) coordinates. */
rmsup_status rmsup_gaussian_oracle_denoiser(const double* x_t, size_t n, double t,
                                            double mu0, double var0, double* f_hat,
                                            double* eps_hat);

/* score = -eps_hat / sqrt(1 - abar_t) */
rmsup_status rmsup_score_from_eps(const double* eps_hat, size_t n, double abar_t,
                                  double* out);

/* ---- command entry points ----
 *
 * config_path may be NULL (defaults only); overrides are "key=value"
 * strings applied after the file and the RMSUP_WORKERS environment
 * variable. Outputs land under the configured output directory.
 */

rmsup_status rmsup_cmd_gen(const char* config_path, const char* const* overrides,
                           int n_overrides);
rmsup_status rmsup_cmd_edge(const char* config_path, const char* const* overrides,
                            int n_overrides);
rmsup_status rmsup_cmd_down(const char* config_path, const char* const* overrides,
                            int n_overrides);
rmsup_status rmsup_cmd_sr(const char* config_path, const char* const* overrides,
                          int n_overrides);
rmsup_status rmsup_cmd_ddm_demo(const char* config_path, const char* const* overrides,
                                int n_overrides);
/* n_failed (nullable) receives the number of failed scene evaluations. */
rmsup_status rmsup_cmd_eval(const char* config_path, const char* const* overrides,
                            int n_overrides, int* n_failed);
rmsup_status rmsup_cmd_pipeline(const char* config_path, const char* const* overrides,
                                int n_overrides, int* n_failed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RMSUP_H */
