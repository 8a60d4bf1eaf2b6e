#pragma once

// Command-level entry points behind the CLI subcommands. Each takes a full
// RunConfig, writes its outputs under config.output_dir with the fixed
// naming scheme (scene_<seed>.txt, gt_<seed>.rmg, k_<method>_<seed>.rmg,
// phat_<method>_<seed>.rmg, report.csv, summary.csv), and is deterministic
// for a given config.

#include <vector>

#include "rmsup/config.hpp"
#include "rmsup/eval.hpp"

namespace rmsup {

// Generates scene_count scenes (per-scene seed = seed + index) with their
// ground-truth maps and building masks; writes manifest.csv and returns the
// rows.
std::vector<ManifestRow> cmd_gen(const RunConfig& config);

// Extracts the configured method's edge map from the input power grid and
// writes k_<method>.rmg/.pgm.
void cmd_edge(const RunConfig& config);

// Downsamples the input grid by the stride and writes the normalized
// low-resolution map (plus the guidance channel when one is supplied).
void cmd_down(const RunConfig& config);

// Reconstructs a high-resolution map from the input low-resolution grid.
// Guidance comes from the explicit guidance file when given, otherwise from
// the configured method applied to the bilinearly lifted input ("base" or an
// empty method means unguided). Writes p_hat.rmg/.pgm and energy_trace.csv.
void cmd_sr(const RunConfig& config);

struct DdmDemoResult {
    int steps = 0;
    int samples = 0;
    double final_mean = 0.0;
    double final_var = 0.0;
    double mean_tolerance = 0.0; // 4-standard-error bands around the target
    double var_tolerance = 0.0;
};

// Runs the analytic-denoiser reverse chain toward N(mu0, var0) on a
// quadratic time grid, writes ddm_trace.csv and ddm_hist.pgm, then checks
// the final sample moments against the target within 4 standard errors;
// a miss throws MomentCheckFailed (after the files are written).
DdmDemoResult cmd_ddm_demo(const RunConfig& config);

// Evaluates an existing manifest (config.manifest_path, defaulting to
// output_dir/manifest.csv) under the configured methods; writes report.csv,
// summary.csv, and per-scene artifacts.
ComparisonReport cmd_eval(const RunConfig& config);

// gen + eval end to end.
ComparisonReport cmd_pipeline(const RunConfig& config);

// True when no per-scene evaluation failed.
bool all_succeeded(const ComparisonReport& report);

} // namespace rmsup
