#pragma once

// Metric suite (RMSE, NMSE, PSNR, SSIM, IOU) and the scene-corpus comparison
// harness that reconstructs every scene under each guidance method and
// reports per-scene metrics plus per-method mean/std summaries.

#include <cstdint>
#include <string>
#include <vector>

#include "rmsup/grid.hpp"
#include "rmsup/recon.hpp"
#include "rmsup/scenegen.hpp"

namespace rmsup {

double rmse(const Grid2D& p_hat, const Grid2D& p);

// Error energy over reference energy: sum((p_hat - p)^2) / sum(p^2).
double nmse(const Grid2D& p_hat, const Grid2D& p);

// 10 * log10(max_val^2 / MSE); +infinity when the maps are identical.
double psnr(const Grid2D& p_hat, const Grid2D& p, double max_val = 1.0);

// Mean local SSIM over all fully interior 11x11 windows, Gaussian-weighted
// (sigma = 1.5), K1 = 0.01, K2 = 0.03, dynamic range L = 1.
double ssim(const Grid2D& a, const Grid2D& b);

// Foreground = cells >= threshold in both maps; intersection over union of
// the two foreground sets. Both empty counts as perfect agreement (1.0).
double iou(const Grid2D& p_hat, const Grid2D& p_gt, double threshold = 10.0 / 255.0);

struct MetricsReport {
    double rmse = 0.0;
    double nmse = 0.0;
    double psnr_db = 0.0;
    double ssim = 0.0;
    double iou = 0.0;
    std::string method_label;
    std::uint64_t scene_seed = 0;
};

// One scene x method evaluation; `failed` rows carry the error text instead
// of metric values.
struct EvalRow {
    MetricsReport metrics;
    bool failed = false;
    std::string error;
};

struct SummaryRow {
    std::string method;
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0; // population standard deviation over scenes
    int n = 0;
};

struct ComparisonReport {
    std::vector<EvalRow> rows;       // scene-major, method-minor, manifest order
    std::vector<SummaryRow> summary; // method x metric
};

struct ComparisonConfig {
    std::vector<GuidanceMethod> methods{GuidanceMethod::KEdge, GuidanceMethod::LBP,
                                        GuidanceMethod::Canny, GuidanceMethod::None};
    int stride = 4;
    SrConfig sr;
    EdgeParams edge;
    int workers = 1;
    // Extract guidance edges from the bilinearly upsampled low-res map
    // instead of the full-resolution ground truth.
    bool realistic_guidance = false;
    // When set, per-scene artifacts (edge maps, reconstructions, panels) are
    // written under this directory as the evaluation runs.
    std::string out_dir;
    bool write_panels = false;
};

// For every manifest scene and every configured method: build the low-res
// pair, reconstruct, score against the ground truth (IOU against the scene's
// free-space mask). Scenes fan out across `workers` threads; rows and files
// come out identical for any worker count. A failing scene is recorded in
// its row, not fatal.
ComparisonReport run_comparison(const std::vector<ManifestRow>& manifest,
                                const ComparisonConfig& config);

// report.csv: seed,method,rmse,nmse,ssim,psnr_db,iou (failed rows leave the
// metric fields empty). summary.csv: method,metric,mean,std,n.
void write_report_csv(const ComparisonReport& report, const std::string& path);
void write_summary_csv(const ComparisonReport& report, const std::string& path);

// GT | guidance | reconstruction side-by-side grid for a PGM panel.
Grid2D make_panel(const Grid2D& gt, const Grid2D& guidance, const Grid2D& recon);

} // namespace rmsup
