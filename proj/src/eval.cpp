#include "rmsup/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "rmsup/resample.hpp"

namespace rmsup {

namespace {

void require_same_shape(const Grid2D& a, const Grid2D& b, const char* what) {
    if (!a.same_shape(b))
        fail(Errc::DimensionMismatch, std::string(what) + ": grid shapes differ");
}

} // namespace

double rmse(const Grid2D& p_hat, const Grid2D& p) {
    require_same_shape(p_hat, p, "rmse");
    double acc = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        const double d = p_hat[c] - p[c];
        acc += d * d;
    }
    return std::sqrt(acc / double(p.size()));
}

double nmse(const Grid2D& p_hat, const Grid2D& p) {
    require_same_shape(p_hat, p, "nmse");
    double err = 0.0, ref = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        const double d = p_hat[c] - p[c];
        err += d * d;
        ref += p[c] * p[c];
    }
    if (ref == 0.0)
        fail(Errc::ZeroReference, "nmse: reference map is identically zero");
    return err / ref;
}

double psnr(const Grid2D& p_hat, const Grid2D& p, double max_val) {
    require_same_shape(p_hat, p, "psnr");
    if (!(max_val > 0.0))
        fail(Errc::InvalidArgument, "psnr: max_val must be positive");
    double acc = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        const double d = p_hat[c] - p[c];
        acc += d * d;
    }
    const double mse = acc / double(p.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(max_val * max_val / mse);
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;
constexpr double kSsimL = 1.0;

// 11x11 Gaussian window, normalized to sum 1.
std::vector<double> ssim_window() {
    std::vector<double> w(std::size_t(kSsimWindow) * kSsimWindow);
    const int r = kSsimWindow / 2;
    double sum = 0.0;
    for (int i = -r; i <= r; ++i)
        for (int j = -r; j <= r; ++j) {
            const double v = std::exp(-(i * i + j * j) / (2.0 * kSsimSigma * kSsimSigma));
            w[std::size_t(i + r) * kSsimWindow + (j + r)] = v;
            sum += v;
        }
    for (double& v : w) v /= sum;
    return w;
}

} // namespace

double ssim(const Grid2D& a, const Grid2D& b) {
    require_same_shape(a, b, "ssim");
    const int w = a.width(), h = a.height();
    if (w < kSsimWindow || h < kSsimWindow)
        fail(Errc::GridTooSmall, "ssim: needs at least 11x11");
    static const std::vector<double> win = ssim_window();
    const double c1 = (kSsimK1 * kSsimL) * (kSsimK1 * kSsimL);
    const double c2 = (kSsimK2 * kSsimL) * (kSsimK2 * kSsimL);
    const int r = kSsimWindow / 2;

    double total = 0.0;
    long count = 0;
    for (int ci = r; ci < h - r; ++ci)
        for (int cj = r; cj < w - r; ++cj) {
            double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
            for (int di = -r; di <= r; ++di)
                for (int dj = -r; dj <= r; ++dj) {
                    const double wt = win[std::size_t(di + r) * kSsimWindow + (dj + r)];
                    const double va = a.at(ci + di, cj + dj);
                    const double vb = b.at(ci + di, cj + dj);
                    mu_a += wt * va;
                    mu_b += wt * vb;
                    aa += wt * va * va;
                    bb += wt * vb * vb;
                    ab += wt * va * vb;
                }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += num / den;
            ++count;
        }
    return total / double(count);
}

double iou(const Grid2D& p_hat, const Grid2D& p_gt, double threshold) {
    require_same_shape(p_hat, p_gt, "iou");
    long inter = 0, uni = 0;
    for (std::size_t c = 0; c < p_hat.size(); ++c) {
        const bool fa = p_hat[c] >= threshold;
        const bool fb = p_gt[c] >= threshold;
        inter += fa && fb;
        uni += fa || fb;
    }
    if (uni == 0) return 1.0;
    return double(inter) / double(uni);
}

namespace {

// Evaluates one scene under every configured method, writing that scene's
// artifact files if an output directory is set.
std::vector<EvalRow> eval_scene(const ManifestRow& row, const ComparisonConfig& config) {
    std::vector<EvalRow> rows(config.methods.size());
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
        rows[m].metrics.method_label = guidance_method_name(config.methods[m]);
        rows[m].metrics.scene_seed = row.seed;
    }

    // A scene whose files cannot be loaded fails every method row; the
    // remaining manifest entries still run.
    std::optional<Grid2D> gt_opt, free_opt;
    try {
        gt_opt = read_rmg(row.gt_path);
        const Grid2D mask = read_rmg(row.mask_path); // 1 inside buildings
        std::vector<double> inv(mask.size());
        for (std::size_t c = 0; c < inv.size(); ++c) {
            if (mask[c] != 0.0 && mask[c] != 1.0)
                fail(Errc::ValueOutOfRange, "eval: building mask is not 0/1");
            inv[c] = 1.0 - mask[c];
        }
        free_opt = Grid2D(mask.width(), mask.height(), mask.spacing(), std::move(inv));
    } catch (const std::exception& e) {
        for (EvalRow& out : rows) {
            out.failed = true;
            out.error = e.what();
        }
        return rows;
    }
    const Grid2D& gt = *gt_opt;
    const Grid2D& free_space = *free_opt;

    const int n = gt.width();
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
        const GuidanceMethod method = config.methods[m];
        EvalRow& out = rows[m];
        try {
            // Guidance edges from the full-resolution map (idealized) or from
            // the bilinearly lifted low-res map (realistic).
            std::optional<Grid2D> edge_src;
            if (method != GuidanceMethod::None && config.realistic_guidance) {
                Grid2D p_lr_plain = uniform_downsample(gt, config.stride);
                edge_src = upsample_bilinear(p_lr_plain, n, gt.height());
            }
            const std::optional<Grid2D> k_hr = guidance_from_method(
                config.realistic_guidance && edge_src ? *edge_src : gt, method, config.edge);

            BinaryMask k_bits = BinaryMask::zeros(n, gt.height());
            if (k_hr) {
                std::vector<std::uint8_t> bits(k_hr->size());
                for (std::size_t c = 0; c < bits.size(); ++c)
                    bits[c] = (*k_hr)[c] > 0.5 ? 1 : 0;
                k_bits = BinaryMask(n, gt.height(), std::move(bits));
            }

            // Guidance goes to the reconstructor at full resolution: the
            // one-cell edge band does not survive the bilinear squeeze to
            // low-res, and the reconstructor accepts either size.
            const LrPair lr = make_lr_pair(gt, k_bits, config.stride);
            const SrResult sr = reconstruct(lr.p_lr, k_hr, config.stride, config.sr);

            // Back to the ground-truth scale before scoring.
            std::vector<double> rescaled(sr.p_hat.size());
            const double span = lr.p_hi - lr.p_lo;
            for (std::size_t c = 0; c < rescaled.size(); ++c)
                rescaled[c] = sr.p_hat[c] * span + lr.p_lo;
            const Grid2D p_hat(n, gt.height(), gt.spacing(), std::move(rescaled));

            out.metrics.rmse = rmse(p_hat, gt);
            out.metrics.nmse = nmse(p_hat, gt);
            out.metrics.psnr_db = psnr(p_hat, gt);
            out.metrics.ssim = ssim(p_hat, gt);
            out.metrics.iou = iou(p_hat, free_space);

            if (!config.out_dir.empty()) {
                const std::string tag =
                    std::string(guidance_method_name(method)) + "_" + std::to_string(row.seed);
                if (k_hr)
                    write_rmg(*k_hr, config.out_dir + "/k_" + tag + ".rmg");
                write_rmg(p_hat, config.out_dir + "/phat_" + tag + ".rmg");
                if (config.write_panels) {
                    const Grid2D blank = Grid2D::filled(n, gt.height(), gt.spacing(), 0.0);
                    write_pgm(make_panel(gt, k_hr ? *k_hr : blank, p_hat),
                              config.out_dir + "/panel_" + tag + ".pgm");
                }
            }
        } catch (const std::exception& e) {
            out.failed = true;
            out.error = e.what();
        }
    }
    return rows;
}

double finite_or_cap(double v) {
    // PSNR can be +inf on perfect rows; cap for mean/std aggregation.
    return std::isinf(v) ? 1e9 : v;
}

} // namespace

ComparisonReport run_comparison(const std::vector<ManifestRow>& manifest,
                                const ComparisonConfig& config) {
    if (manifest.empty())
        fail(Errc::InvalidArgument, "run_comparison: empty manifest");
    if (config.methods.empty())
        fail(Errc::InvalidArgument, "run_comparison: no methods selected");
    if (config.workers < 1)
        fail(Errc::InvalidArgument, "run_comparison: workers must be >= 1");
    config.sr.validate();
    config.edge.validate();

    const std::size_t n_methods = config.methods.size();
    ComparisonReport report;
    report.rows.resize(manifest.size() * n_methods);

    const int workers = int(std::min<std::size_t>(std::size_t(config.workers), manifest.size()));
    if (workers <= 1) {
        for (std::size_t s = 0; s < manifest.size(); ++s) {
            auto rows = eval_scene(manifest[s], config);
            std::move(rows.begin(), rows.end(), report.rows.begin() + long(s * n_methods));
        }
    } else {
        // Static round-robin scene assignment; every row slot is written by
        // exactly one worker, so the merged result is order-independent.
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w]() {
                for (std::size_t s = std::size_t(w); s < manifest.size(); s += std::size_t(workers)) {
                    auto rows = eval_scene(manifest[s], config);
                    std::move(rows.begin(), rows.end(),
                              report.rows.begin() + long(s * n_methods));
                }
            });
        for (auto& t : pool) t.join();
    }

    // Mean/std per method x metric over non-failed scenes.
    const char* metric_names[5] = {"rmse", "nmse", "ssim", "psnr_db", "iou"};
    for (std::size_t m = 0; m < n_methods; ++m) {
        std::vector<double> vals[5];
        for (std::size_t s = 0; s < manifest.size(); ++s) {
            const EvalRow& row = report.rows[s * n_methods + m];
            if (row.failed) continue;
            vals[0].push_back(row.metrics.rmse);
            vals[1].push_back(row.metrics.nmse);
            vals[2].push_back(row.metrics.ssim);
            vals[3].push_back(finite_or_cap(row.metrics.psnr_db));
            vals[4].push_back(row.metrics.iou);
        }
        for (int k = 0; k < 5; ++k) {
            SummaryRow sr;
            sr.method = guidance_method_name(config.methods[m]);
            sr.metric = metric_names[k];
            sr.n = int(vals[k].size());
            if (sr.n > 0) {
                double mean = 0.0;
                for (double v : vals[k]) mean += v;
                mean /= double(sr.n);
                double var = 0.0;
                for (double v : vals[k]) var += (v - mean) * (v - mean);
                sr.mean = mean;
                sr.stddev = std::sqrt(var / double(sr.n));
            }
            report.summary.push_back(std::move(sr));
        }
    }
    return report;
}

namespace {

std::string fmt_metric(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

void write_report_csv(const ComparisonReport& report, const std::string& path) {
    std::ostringstream out;
    out << "seed,method,rmse,nmse,ssim,psnr_db,iou\n";
    for (const EvalRow& row : report.rows) {
        out << row.metrics.scene_seed << "," << row.metrics.method_label << ",";
        if (row.failed) {
            // Metric fields stay empty; the error text lives on the row itself
            // and is reported by the caller.
            out << ",,,,\n";
        } else {
            out << fmt_metric(row.metrics.rmse) << "," << fmt_metric(row.metrics.nmse) << ","
                << fmt_metric(row.metrics.ssim) << "," << fmt_metric(row.metrics.psnr_db) << ","
                << fmt_metric(row.metrics.iou) << "\n";
        }
    }
    std::ofstream f(path, std::ios::trunc);
    if (!f || !(f << out.str()))
        fail(Errc::Io, "write_report_csv: cannot write " + path);
}

void write_summary_csv(const ComparisonReport& report, const std::string& path) {
    std::ostringstream out;
    out << "method,metric,mean,std,n\n";
    for (const SummaryRow& row : report.summary)
        out << row.method << "," << row.metric << "," << fmt_metric(row.mean) << ","
            << fmt_metric(row.stddev) << "," << row.n << "\n";
    std::ofstream f(path, std::ios::trunc);
    if (!f || !(f << out.str()))
        fail(Errc::Io, "write_summary_csv: cannot write " + path);
}

Grid2D make_panel(const Grid2D& gt, const Grid2D& guidance, const Grid2D& recon) {
    if (!gt.same_shape(guidance) || !gt.same_shape(recon))
        fail(Errc::DimensionMismatch, "make_panel: grid shapes differ");
    const int w = gt.width(), h = gt.height();
    const int sep = 2; // white divider columns
    const int pw = 3 * w + 2 * sep;
    std::vector<double> px(std::size_t(pw) * h, 1.0);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            px[std::size_t(i) * pw + j] = gt.at(i, j);
            px[std::size_t(i) * pw + w + sep + j] = guidance.at(i, j);
            px[std::size_t(i) * pw + 2 * (w + sep) + j] = recon.at(i, j);
        }
    return Grid2D(pw, h, gt.spacing(), std::move(px));
}

} // namespace rmsup
