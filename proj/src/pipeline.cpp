#include "rmsup/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rmsup/diffusion.hpp"
#include "rmsup/resample.hpp"
#include "rmsup/rng.hpp"

namespace rmsup {

namespace {

void ensure_out_dir(const RunConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec)
        fail(Errc::Io, "cannot create output directory '" + config.output_dir + "': " +
                           ec.message());
}

std::string out_path(const RunConfig& config, const std::string& name) {
    return config.output_dir + "/" + name;
}

Grid2D read_input_grid(const RunConfig& config, const char* cmd) {
    if (config.input_path.empty())
        fail(Errc::InvalidArgument, std::string(cmd) + ": no input file given");
    return read_rmg(config.input_path);
}

std::vector<GuidanceMethod> parse_method_list(const std::string& csv) {
    std::vector<GuidanceMethod> methods;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) methods.push_back(parse_guidance_method(tok));
    if (methods.empty())
        fail(Errc::Config, "config: eval.methods selects no methods");
    return methods;
}

ComparisonConfig comparison_config(const RunConfig& config) {
    ComparisonConfig cc;
    cc.methods = parse_method_list(config.eval_methods);
    cc.stride = config.stride;
    cc.sr = config.sr;
    cc.edge = config.edge;
    cc.workers = config.workers;
    cc.realistic_guidance = config.realistic_guidance;
    cc.out_dir = config.output_dir;
    cc.write_panels = config.write_panels;
    return cc;
}

} // namespace

std::vector<ManifestRow> cmd_gen(const RunConfig& config) {
    config.validate();
    ensure_out_dir(config);
    std::vector<ManifestRow> rows;
    rows.reserve(std::size_t(config.scene_count));
    for (int i = 0; i < config.scene_count; ++i) {
        const std::uint64_t scene_seed = config.seed + std::uint64_t(i);
        const Scene scene = gen_scene(scene_seed, config.scene);
        const SimResult sim = simulate_pathloss(scene, config.prop);
        const BinaryMask mask = building_mask(scene);

        const std::string tag = std::to_string(scene_seed);
        ManifestRow row;
        row.seed = scene_seed;
        row.scene_path = out_path(config, "scene_" + tag + ".txt");
        row.gt_path = out_path(config, "gt_" + tag + ".rmg");
        row.mask_path = out_path(config, "mask_" + tag + ".rmg");

        write_scene(scene, row.scene_path);
        write_rmg(sim.map.grid(), row.gt_path);
        write_pgm(sim.map.grid(), out_path(config, "gt_" + tag + ".pgm"));
        write_rmg(mask_to_grid(mask, scene.spacing()), row.mask_path);
        write_pgm(mask, out_path(config, "mask_" + tag + ".pgm"));
        rows.push_back(std::move(row));
    }
    write_manifest(rows, out_path(config, "manifest.csv"));
    return rows;
}

void cmd_edge(const RunConfig& config) {
    config.validate();
    ensure_out_dir(config);
    const Grid2D power = read_input_grid(config, "edge");
    const GuidanceMethod method = parse_guidance_method(config.method);
    const std::optional<Grid2D> k = guidance_from_method(power, method, config.edge);
    if (!k)
        fail(Errc::InvalidArgument, "edge: method 'base' produces no edge map");
    const std::string stem = "k_" + config.method;
    write_rmg(*k, out_path(config, stem + ".rmg"));
    write_pgm(*k, out_path(config, stem + ".pgm"));
}

void cmd_down(const RunConfig& config) {
    config.validate();
    ensure_out_dir(config);
    const Grid2D power = read_input_grid(config, "down");

    BinaryMask k_bits = BinaryMask::zeros(power.width(), power.height());
    if (!config.guidance_path.empty()) {
        const Grid2D k = read_rmg(config.guidance_path);
        if (!k.same_shape(power))
            fail(Errc::DimensionMismatch, "down: guidance shape differs from input");
        std::vector<std::uint8_t> bits(k.size());
        for (std::size_t c = 0; c < bits.size(); ++c) bits[c] = k[c] > 0.5 ? 1 : 0;
        k_bits = BinaryMask(k.width(), k.height(), std::move(bits));
    }

    const LrPair lr = make_lr_pair(power, k_bits, config.stride);
    write_rmg(lr.p_lr, out_path(config, "p_lr.rmg"));
    write_pgm(lr.p_lr, out_path(config, "p_lr.pgm"));
    if (!config.guidance_path.empty()) {
        write_rmg(lr.k_lr, out_path(config, "k_lr.rmg"));
        write_pgm(lr.k_lr, out_path(config, "k_lr.pgm"));
    }
}

void cmd_sr(const RunConfig& config) {
    config.validate();
    ensure_out_dir(config);
    const Grid2D p_lr = read_input_grid(config, "sr");

    std::optional<Grid2D> guidance;
    if (!config.guidance_path.empty()) {
        guidance = read_rmg(config.guidance_path);
    } else if (!config.method.empty() &&
               parse_guidance_method(config.method) != GuidanceMethod::None) {
        // No guidance file: extract edges from the lifted low-res map.
        const Grid2D lifted = upsample_bilinear(p_lr, p_lr.width() * config.stride,
                                                p_lr.height() * config.stride);
        guidance =
            guidance_from_method(lifted, parse_guidance_method(config.method), config.edge);
    }

    const SrResult result = reconstruct(p_lr, guidance, config.stride, config.sr);

    write_rmg(result.p_hat, out_path(config, "p_hat.rmg"));
    write_pgm(result.p_hat, out_path(config, "p_hat.pgm"));

    std::ostringstream trace;
    trace << "iteration,energy\n";
    for (std::size_t k = 0; k < result.energy_trace.size(); ++k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", result.energy_trace[k]);
        trace << k << "," << buf << "\n";
    }
    std::ofstream f(out_path(config, "energy_trace.csv"), std::ios::trunc);
    if (!f || !(f << trace.str()))
        fail(Errc::Io, "sr: cannot write energy_trace.csv");
}

DdmDemoResult cmd_ddm_demo(const RunConfig& config) {
    config.validate();
    ensure_out_dir(config);
    const int steps = config.demo_steps;
    const int n = config.demo_samples;
    const double mu0 = config.demo_mu0;
    const double var0 = config.demo_var0;

    SplitMix64 rng(config.seed);
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (double& v : x) v = rng.next_normal();

    auto grid_time = [&](int k) {
        // Quadratic reverse-time grid: uniform spacing overshoots the target
        // variance near t = 0, where the marginal changes fastest; packing
        // steps there keeps the discretization bias well inside the 4-SE band.
        const double u = 1.0 - double(k) / double(steps);
        return u * u;
    };

    auto moments = [&](const std::vector<double>& v) {
        double mean = 0.0;
        for (double e : v) mean += e;
        mean /= double(v.size());
        double var = 0.0;
        for (double e : v) var += (e - mean) * (e - mean);
        var /= double(v.size() - 1);
        return std::pair<double, double>(mean, var);
    };

    std::ostringstream trace;
    trace << "step,t,mean,var\n";
    auto log_row = [&](int k, double t, const std::vector<double>& v) {
        const auto [mean, var] = moments(v);
        char buf[96];
        std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g\n", k, t, mean, var);
        trace << buf;
    };
    log_row(0, 1.0, x);

    std::vector<double> noise(static_cast<std::size_t>(n), 0.0);
    for (int k = 1; k <= steps; ++k) {
        const double t_prev = grid_time(k - 1);
        const double t_next = grid_time(k);
        const DenoiserOutput den = gaussian_oracle_denoiser(x, t_prev, mu0, var0);
        for (double& v : noise) v = rng.next_normal();
        x = ddm_reverse_step(x, t_prev, t_prev - t_next, den, noise);
        log_row(k, t_next, x);
    }

    {
        std::ofstream f(out_path(config, "ddm_trace.csv"), std::ios::trunc);
        if (!f || !(f << trace.str()))
            fail(Errc::Io, "ddm-demo: cannot write ddm_trace.csv");
    }

    // Histogram of the final samples over mu0 +/- 4 sigma, dark bars on white.
    {
        const int bins = 64, rows = 64;
        const double sd = std::sqrt(var0);
        const double lo = mu0 - 4.0 * sd, hi = mu0 + 4.0 * sd;
        std::vector<long> counts(std::size_t(bins), 0);
        for (double v : x) {
            const int b = int(std::floor((v - lo) / (hi - lo) * bins));
            ++counts[std::size_t(std::clamp(b, 0, bins - 1))];
        }
        const long peak = std::max<long>(1, *std::max_element(counts.begin(), counts.end()));
        std::vector<double> img(std::size_t(bins) * rows, 1.0);
        for (int b = 0; b < bins; ++b) {
            const int bar = int(std::lround(double(counts[std::size_t(b)]) / double(peak) *
                                            double(rows)));
            for (int r = 0; r < bar; ++r)
                img[std::size_t(rows - 1 - r) * bins + std::size_t(b)] = 0.0;
        }
        write_pgm(Grid2D(bins, rows, 1.0, std::move(img)),
                  out_path(config, "ddm_hist.pgm"));
    }

    DdmDemoResult result;
    result.steps = steps;
    result.samples = n;
    std::tie(result.final_mean, result.final_var) = moments(x);
    result.mean_tolerance = 4.0 * std::sqrt(var0 / double(n));
    result.var_tolerance = 4.0 * var0 * std::sqrt(2.0 / double(n - 1));

    if (std::abs(result.final_mean - mu0) > result.mean_tolerance ||
        std::abs(result.final_var - var0) > result.var_tolerance) {
        char msg[256];
        std::snprintf(msg, sizeof msg,
                      "ddm-demo: final moments (%.6g, %.6g) miss target (%.6g, %.6g) "
                      "beyond 4 standard errors (tol %.3g / %.3g)",
                      result.final_mean, result.final_var, mu0, var0, result.mean_tolerance,
                      result.var_tolerance);
        fail(Errc::MomentCheckFailed, msg);
    }
    return result;
}

ComparisonReport cmd_eval(const RunConfig& config) {
    config.validate();
    ensure_out_dir(config);
    const std::string manifest_path =
        config.manifest_path.empty() ? out_path(config, "manifest.csv") : config.manifest_path;
    const std::vector<ManifestRow> manifest = read_manifest(manifest_path);

    const ComparisonReport report = run_comparison(manifest, comparison_config(config));
    write_report_csv(report, out_path(config, "report.csv"));
    write_summary_csv(report, out_path(config, "summary.csv"));
    return report;
}

ComparisonReport cmd_pipeline(const RunConfig& config) {
    config.validate();
    const std::vector<ManifestRow> manifest = cmd_gen(config);
    const ComparisonReport report = run_comparison(manifest, comparison_config(config));
    write_report_csv(report, out_path(config, "report.csv"));
    write_summary_csv(report, out_path(config, "summary.csv"));
    return report;
}

bool all_succeeded(const ComparisonReport& report) {
    return std::none_of(report.rows.begin(), report.rows.end(),
                        [](const EvalRow& r) { return r.failed; });
}

} // namespace rmsup
