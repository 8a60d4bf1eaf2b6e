#include "rmsup/helm_edge.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rmsup {

void EdgeParams::validate() const {
    if (!(epsilon > 0.0))
        fail(Errc::InvalidArgument, "EdgeParams: epsilon must be positive");
    if (!(canny_sigma > 0.0))
        fail(Errc::InvalidArgument, "EdgeParams: canny_sigma must be positive");
    if (canny_low < 0.0 || !(canny_low < canny_high))
        fail(Errc::BadThresholds, "EdgeParams: require 0 <= canny_low < canny_high");
    if (lbp_edge_threshold < 0 || lbp_edge_threshold > 8)
        fail(Errc::InvalidArgument, "EdgeParams: lbp_edge_threshold in [0,8]");
}

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

} // namespace

Grid2D laplacian5(const Grid2D& g) {
    const int w = g.width(), h = g.height();
    if (w < 3 || h < 3)
        fail(Errc::GridTooSmall, "laplacian5: grid must be at least 3x3");
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    std::vector<double> out(g.size());
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            const double up = g.at(clampi(i - 1, 0, h - 1), j);
            const double dn = g.at(clampi(i + 1, 0, h - 1), j);
            const double lf = g.at(i, clampi(j - 1, 0, w - 1));
            const double rt = g.at(i, clampi(j + 1, 0, w - 1));
            out[std::size_t(i) * w + j] = (up + dn + lf + rt - 4.0 * g.at(i, j)) * inv_h2;
        }
    }
    return Grid2D(w, h, g.spacing(), std::move(out));
}

Grid2D laplacian5(const AmplitudeMap& a) { return laplacian5(a.grid()); }

CurvatureMap k_eff_sq(const AmplitudeMap& a, const EdgeParams& params) {
    params.validate();
    const Grid2D lap = laplacian5(a.grid());
    std::vector<double> out(lap.size());
    auto av = a.grid().values();
    auto lv = lap.values();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = -lv[k] / (av[k] + params.epsilon);
    return {Grid2D(lap.width(), lap.height(), lap.spacing(), std::move(out)),
            CurvatureMap::Kind::EffectiveWavenumberSq};
}

CurvatureMap k_log(const AmplitudeMap& a, const EdgeParams& params) {
    params.validate();
    const Grid2D& g = a.grid();
    std::vector<double> logv(g.size());
    auto av = g.values();
    for (std::size_t k = 0; k < logv.size(); ++k) logv[k] = std::log(av[k] + params.epsilon);
    Grid2D lap = laplacian5(Grid2D(g.width(), g.height(), g.spacing(), std::move(logv)));
    std::vector<double> out(lap.size());
    auto lv = lap.values();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = -lv[k];
    return {Grid2D(lap.width(), lap.height(), lap.spacing(), std::move(out)),
            CurvatureMap::Kind::LogCurvature};
}

BinaryMask k_edge_map(const AmplitudeMap& a, const EdgeParams& params) {
    const CurvatureMap c = k_eff_sq(a, params);
    std::vector<std::uint8_t> bits(c.grid.size());
    auto cv = c.grid.values();
    for (std::size_t k = 0; k < bits.size(); ++k)
        bits[k] = params.k_sign_flip ? (cv[k] > 0.0) : (cv[k] < 0.0);
    return BinaryMask(c.grid.width(), c.grid.height(), std::move(bits));
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = int(std::ceil(3.0 * sigma));
    std::vector<double> k(std::size_t(2 * radius + 1));
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        const double v = std::exp(-0.5 * (t * t) / (sigma * sigma));
        k[std::size_t(t + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable Gaussian blur with replicate borders.
std::vector<double> gaussian_blur(const Grid2D& g, double sigma) {
    const int w = g.width(), h = g.height();
    const auto kern = gaussian_kernel(sigma);
    const int radius = int(kern.size() / 2);

    std::vector<double> tmp(g.size()), out(g.size());
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += kern[std::size_t(t + radius)] * g.at(i, clampi(j + t, 0, w - 1));
            tmp[std::size_t(i) * w + j] = acc;
        }
    }
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += kern[std::size_t(t + radius)] * tmp[std::size_t(clampi(i + t, 0, h - 1)) * w + j];
            out[std::size_t(i) * w + j] = acc;
        }
    }
    return out;
}

} // namespace

BinaryMask canny(const Grid2D& g, const EdgeParams& params) {
    params.validate();
    const int w = g.width(), h = g.height();
    if (w < 3 || h < 3)
        fail(Errc::GridTooSmall, "canny: grid must be at least 3x3");

    const std::vector<double> blur = gaussian_blur(g, params.canny_sigma);
    auto bl = [&](int i, int j) {
        return blur[std::size_t(clampi(i, 0, h - 1)) * w + clampi(j, 0, w - 1)];
    };

    // Sobel 3x3, replicate border
    std::vector<double> gx(g.size()), gy(g.size()), mag(g.size());
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            const double sx = (bl(i - 1, j + 1) + 2.0 * bl(i, j + 1) + bl(i + 1, j + 1)) -
                              (bl(i - 1, j - 1) + 2.0 * bl(i, j - 1) + bl(i + 1, j - 1));
            const double sy = (bl(i + 1, j - 1) + 2.0 * bl(i + 1, j) + bl(i + 1, j + 1)) -
                              (bl(i - 1, j - 1) + 2.0 * bl(i - 1, j) + bl(i - 1, j + 1));
            const std::size_t k = std::size_t(i) * w + j;
            gx[k] = sx;
            gy[k] = sy;
            mag[k] = std::hypot(sx, sy);
        }
    }

    // Non-maximum suppression, gradient direction quantized to 4 sectors
    std::vector<std::uint8_t> keep(g.size(), 0);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            const std::size_t k = std::size_t(i) * w + j;
            const double m = mag[k];
            if (m == 0.0) continue;
            double angle = std::atan2(gy[k], gx[k]) * (180.0 / 3.14159265358979323846);
            if (angle < 0.0) angle += 180.0;
            int di = 0, dj = 0;
            if (angle < 22.5 || angle >= 157.5) {
                dj = 1;             // horizontal gradient -> compare left/right
            } else if (angle < 67.5) {
                di = 1; dj = 1;     // diagonal
            } else if (angle < 112.5) {
                di = 1;             // vertical gradient -> compare up/down
            } else {
                di = 1; dj = -1;    // anti-diagonal
            }
            const double m1 = mag[std::size_t(clampi(i + di, 0, h - 1)) * w + clampi(j + dj, 0, w - 1)];
            const double m2 = mag[std::size_t(clampi(i - di, 0, h - 1)) * w + clampi(j - dj, 0, w - 1)];
            if (m > m1 && m >= m2) keep[k] = 1;
        }
    }

    // Double threshold + hysteresis (8-connected BFS from strong cells)
    std::vector<std::uint8_t> out(g.size(), 0);
    std::vector<std::size_t> stack;
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            const std::size_t k = std::size_t(i) * w + j;
            if (keep[k] && mag[k] >= params.canny_high && !out[k]) {
                out[k] = 1;
                stack.push_back(k);
                while (!stack.empty()) {
                    const std::size_t cur = stack.back();
                    stack.pop_back();
                    const int ci = int(cur / w), cj = int(cur % w);
                    for (int di = -1; di <= 1; ++di) {
                        for (int dj = -1; dj <= 1; ++dj) {
                            if (di == 0 && dj == 0) continue;
                            const int ni = ci + di, nj = cj + dj;
                            if (ni < 0 || ni >= h || nj < 0 || nj >= w) continue;
                            const std::size_t nk = std::size_t(ni) * w + nj;
                            if (!out[nk] && keep[nk] && mag[nk] >= params.canny_low) {
                                out[nk] = 1;
                                stack.push_back(nk);
                            }
                        }
                    }
                }
            }
        }
    }
    return BinaryMask(w, h, std::move(out));
}

BinaryMask lbp_edge(const Grid2D& g, const EdgeParams& params) {
    params.validate();
    const int w = g.width(), h = g.height();
    if (w < 3 || h < 3)
        fail(Errc::GridTooSmall, "lbp_edge: grid must be at least 3x3");

    // neighbor order: clockwise from top-left
    static constexpr int off_i[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
    static constexpr int off_j[8] = {-1, 0, 1, 1, 1, 0, -1, -1};

    std::vector<std::uint8_t> out(g.size(), 0);
    for (int i = 1; i < h - 1; ++i) {
        for (int j = 1; j < w - 1; ++j) {
            const double c = g.at(i, j);
            unsigned code = 0;
            for (int b = 0; b < 8; ++b)
                if (g.at(i + off_i[b], j + off_j[b]) >= c) code |= (1u << b);
            int transitions = 0;
            for (int b = 0; b < 8; ++b) {
                const unsigned cur = (code >> b) & 1u;
                const unsigned nxt = (code >> ((b + 1) % 8)) & 1u;
                transitions += int(cur != nxt);
            }
            if (transitions > params.lbp_edge_threshold) out[std::size_t(i) * w + j] = 1;
        }
    }
    return BinaryMask(w, h, std::move(out));
}

} // namespace rmsup
