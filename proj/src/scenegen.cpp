#include "rmsup/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rmsup/rng.hpp"

namespace rmsup {

void Scene::validate() const {
    if (grid_n < 1 || !(extent_w_m > 0.0) || extent_w_m != extent_h_m)
        fail(Errc::InvalidArgument, "Scene: requires a square positive extent");
    for (std::size_t a = 0; a < buildings.size(); ++a) {
        const Rect& r = buildings[a];
        if (!(r.x0 < r.x1) || !(r.y0 < r.y1) || r.x0 < 0.0 || r.y0 < 0.0 ||
            r.x1 > extent_w_m || r.y1 > extent_h_m)
            fail(Errc::InvalidArgument, "Scene: building outside extent or degenerate");
        for (std::size_t b = a + 1; b < buildings.size(); ++b)
            if (r.overlaps(buildings[b]))
                fail(Errc::InvalidArgument, "Scene: overlapping buildings");
        if (r.contains(tx_x, tx_y))
            fail(Errc::InvalidArgument, "Scene: transmitter inside a building");
    }
    if (tx_x < 0.0 || tx_x > extent_w_m || tx_y < 0.0 || tx_y > extent_h_m)
        fail(Errc::InvalidArgument, "Scene: transmitter outside extent");
}

void PropagationParams::validate() const {
    if (!(floor_dbm < tx_power_dbm))
        fail(Errc::InvalidArgument, "PropagationParams: floor_dbm must be below tx power");
    if (!(freq_hz > 0.0) || !(wall_loss_db > 0.0))
        fail(Errc::InvalidArgument, "PropagationParams: freq and wall loss must be positive");
}

Scene gen_scene(std::uint64_t seed, const SceneConfig& config) {
    if (config.grid_n < 32)
        fail(Errc::InvalidArgument, "gen_scene: grid_n must be >= 32");
    if (config.buildings_min < 0 || config.buildings_max < config.buildings_min)
        fail(Errc::InvalidArgument, "gen_scene: empty building count range");
    if (!(config.size_min_m > 0.0) || config.size_max_m < config.size_min_m)
        fail(Errc::InvalidArgument, "gen_scene: empty building size range");

    const double extent = config.extent_m > 0.0 ? config.extent_m : double(config.grid_n);
    if (config.size_max_m >= extent)
        fail(Errc::InvalidArgument, "gen_scene: buildings larger than the extent");

    SplitMix64 rng(seed);
    Scene scene;
    scene.extent_w_m = extent;
    scene.extent_h_m = extent;
    scene.seed = seed;
    scene.grid_n = config.grid_n;

    const int count = rng.next_int(config.buildings_min, config.buildings_max);
    int rejections = 0;
    while (int(scene.buildings.size()) < count) {
        const double bw = rng.next_range(config.size_min_m, config.size_max_m);
        const double bh = rng.next_range(config.size_min_m, config.size_max_m);
        const double x0 = rng.next_range(0.0, extent - bw);
        const double y0 = rng.next_range(0.0, extent - bh);
        const Rect cand{x0, y0, x0 + bw, y0 + bh};
        bool ok = true;
        for (const Rect& r : scene.buildings)
            if (cand.overlaps(r)) { ok = false; break; }
        if (ok) {
            scene.buildings.push_back(cand);
        } else if (++rejections >= 10000) {
            fail(Errc::PlacementFailure, "gen_scene: could not place buildings (overcrowded)");
        }
    }

    rejections = 0;
    for (;;) {
        const double x = rng.next_range(0.0, extent);
        const double y = rng.next_range(0.0, extent);
        bool free_space = true;
        for (const Rect& r : scene.buildings)
            if (r.contains(x, y)) { free_space = false; break; }
        if (free_space) {
            scene.tx_x = x;
            scene.tx_y = y;
            break;
        }
        if (++rejections >= 10000)
            fail(Errc::PlacementFailure, "gen_scene: could not place transmitter");
    }
    scene.validate();
    return scene;
}

namespace {

// Segment/rectangle overlap interval via Liang-Barsky slab clipping.
// Returns false on miss; otherwise [t0,t1] within [0,1] covers the rect.
bool clip_segment(double px, double py, double qx, double qy, const Rect& r,
                  double& t0, double& t1) {
    t0 = 0.0;
    t1 = 1.0;
    const double d[2] = {qx - px, qy - py};
    const double p[2] = {px, py};
    const double lo[2] = {r.x0, r.y0};
    const double hi[2] = {r.x1, r.y1};
    for (int axis = 0; axis < 2; ++axis) {
        if (d[axis] == 0.0) {
            if (p[axis] < lo[axis] || p[axis] > hi[axis]) return false;
            continue;
        }
        double ta = (lo[axis] - p[axis]) / d[axis];
        double tb = (hi[axis] - p[axis]) / d[axis];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

} // namespace

int wall_crossings(const Scene& scene, double x, double y) {
    int crossings = 0;
    for (const Rect& r : scene.buildings) {
        double t0, t1;
        if (!clip_segment(scene.tx_x, scene.tx_y, x, y, r, t0, t1)) continue;
        const double tm = 0.5 * (t0 + t1);
        const double mx = scene.tx_x + tm * (x - scene.tx_x);
        const double my = scene.tx_y + tm * (y - scene.tx_y);
        const bool through_interior = mx > r.x0 && mx < r.x1 && my > r.y0 && my < r.y1;
        crossings += through_interior ? 2 : 1;
    }
    return crossings;
}

SimResult simulate_pathloss(const Scene& scene, const PropagationParams& params) {
    scene.validate();
    params.validate();

    const int n = scene.grid_n;
    const double h = scene.spacing();
    // FSPL(d) = 20 log10(d) + 20 log10(f) - 147.55, d in meters
    const double fspl_const = 20.0 * std::log10(params.freq_hz) - 147.55;

    std::vector<double> dbm(std::size_t(n) * n);
    for (int i = 0; i < n; ++i) {
        const double cy = (i + 0.5) * h;
        for (int j = 0; j < n; ++j) {
            const double cx = (j + 0.5) * h;
            double v;
            bool interior = false;
            for (const Rect& r : scene.buildings)
                if (r.contains(cx, cy)) { interior = true; break; }
            if (interior) {
                v = params.interior_dbm;
            } else {
                const double d = std::max(std::hypot(cx - scene.tx_x, cy - scene.tx_y), 0.5 * h);
                const double fspl = 20.0 * std::log10(d) + fspl_const;
                v = params.tx_power_dbm - fspl -
                    params.wall_loss_db * wall_crossings(scene, cx, cy);
            }
            dbm[std::size_t(i) * n + j] = std::clamp(v, params.floor_dbm, params.tx_power_dbm);
        }
    }

    Grid2D dbm_grid(n, n, h, std::move(dbm));
    Normalized norm = normalize_minmax(dbm_grid);
    RadioMap map(std::move(norm.grid), {scene.tx_x, scene.tx_y}, params.freq_hz,
                 {norm.lo, norm.hi});
    return {std::move(map), std::move(dbm_grid)};
}

BinaryMask building_mask(const Scene& scene) {
    const int n = scene.grid_n;
    const double h = scene.spacing();
    std::vector<std::uint8_t> bits(std::size_t(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        const double cy = (i + 0.5) * h;
        for (int j = 0; j < n; ++j) {
            const double cx = (j + 0.5) * h;
            for (const Rect& r : scene.buildings)
                if (r.contains(cx, cy)) { bits[std::size_t(i) * n + j] = 1; break; }
        }
    }
    return BinaryMask(n, n, std::move(bits));
}

namespace {

std::string fmt_f64(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_scene(const Scene& scene, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        fail(Errc::Io, "write_scene: cannot open " + path);
    out << "seed=" << scene.seed << "\n";
    out << "grid_n=" << scene.grid_n << "\n";
    out << "extent=" << fmt_f64(scene.extent_w_m) << "," << fmt_f64(scene.extent_h_m) << "\n";
    out << "tx=" << fmt_f64(scene.tx_x) << "," << fmt_f64(scene.tx_y) << "\n";
    for (const Rect& r : scene.buildings)
        out << "bldg=" << fmt_f64(r.x0) << "," << fmt_f64(r.y0) << "," << fmt_f64(r.x1) << ","
            << fmt_f64(r.y1) << "\n";
    if (!out)
        fail(Errc::Io, "write_scene: write failed for " + path);
}

namespace {

std::vector<double> parse_csv_doubles(const std::string& s, std::size_t expect,
                                      const std::string& ctx) {
    std::vector<double> vals;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            fail(Errc::Config, ctx + ": bad number '" + tok + "'");
        }
        if (pos != tok.size())
            fail(Errc::Config, ctx + ": trailing characters in '" + tok + "'");
        vals.push_back(v);
    }
    if (vals.size() != expect)
        fail(Errc::Config, ctx + ": expected " + std::to_string(expect) + " values");
    return vals;
}

} // namespace

Scene read_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(Errc::Io, "read_scene: cannot open " + path);
    Scene scene;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(Errc::Config, "read_scene: malformed line '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "seed") {
            scene.seed = std::stoull(val);
        } else if (key == "grid_n") {
            scene.grid_n = std::stoi(val);
        } else if (key == "extent") {
            auto v = parse_csv_doubles(val, 2, "read_scene extent");
            scene.extent_w_m = v[0];
            scene.extent_h_m = v[1];
        } else if (key == "tx") {
            auto v = parse_csv_doubles(val, 2, "read_scene tx");
            scene.tx_x = v[0];
            scene.tx_y = v[1];
        } else if (key == "bldg") {
            auto v = parse_csv_doubles(val, 4, "read_scene bldg");
            scene.buildings.push_back({v[0], v[1], v[2], v[3]});
        } else {
            fail(Errc::Config, "read_scene: unknown key '" + key + "'");
        }
    }
    scene.validate();
    return scene;
}

void write_manifest(const std::vector<ManifestRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        fail(Errc::Io, "write_manifest: cannot open " + path);
    out << "seed,scene_path,gt_path,mask_path\n";
    for (const auto& r : rows)
        out << r.seed << "," << r.scene_path << "," << r.gt_path << "," << r.mask_path << "\n";
    if (!out)
        fail(Errc::Io, "write_manifest: write failed for " + path);
}

std::vector<ManifestRow> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(Errc::Io, "read_manifest: cannot open " + path);
    std::vector<ManifestRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            if (line != "seed,scene_path,gt_path,mask_path")
                fail(Errc::Config, "read_manifest: unexpected header '" + line + "'");
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string seed_s, scene_p, gt_p, mask_p;
        if (!std::getline(ss, seed_s, ',') || !std::getline(ss, scene_p, ',') ||
            !std::getline(ss, gt_p, ',') || !std::getline(ss, mask_p))
            fail(Errc::Config, "read_manifest: malformed row '" + line + "'");
        rows.push_back({std::stoull(seed_s), scene_p, gt_p, mask_p});
    }
    if (rows.empty())
        fail(Errc::Config, "read_manifest: no rows in " + path);
    return rows;
}

} // namespace rmsup
