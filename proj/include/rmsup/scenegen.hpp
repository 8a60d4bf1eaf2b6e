#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmsup/grid.hpp"

namespace rmsup {

/// Axis-aligned rectangle in meters, low corner inclusive, high exclusive.
struct Rect {
    double x0, y0, x1, y1;

    double width() const noexcept { return x1 - x0; }
    double height() const noexcept { return y1 - y0; }
    bool contains(double x, double y) const noexcept {
        return x >= x0 && x < x1 && y >= y0 && y < y1;
    }
    bool overlaps(const Rect& o) const noexcept {
        return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
    }
};

/// Seeded synthetic urban layout: axis-aligned buildings plus a transmitter
/// placed in free space, rasterized on an N x N grid.
struct Scene {
    double extent_w_m = 0.0;
    double extent_h_m = 0.0;
    std::vector<Rect> buildings;
    double tx_x = 0.0, tx_y = 0.0;
    std::uint64_t seed = 0;
    int grid_n = 0;

    double spacing() const noexcept { return extent_w_m / grid_n; }

    void validate() const;
};

struct SceneConfig {
    int grid_n = 128;
    double extent_m = 0.0;   // 0 means grid_n * 1.0 m (1 m cells)
    int buildings_min = 5;
    int buildings_max = 15;
    double size_min_m = 8.0;
    double size_max_m = 40.0;
};

struct PropagationParams {
    double tx_power_dbm = 23.0;
    double freq_hz = 5.9e9;
    double wall_loss_db = 10.0;
    double floor_dbm = -150.0;
    double interior_dbm = -150.0; // value assigned inside buildings

    void validate() const;
};

/// Deterministic scene generation: same (seed, config) gives an identical
/// scene on every platform (fixed splitmix64 PRNG). Buildings are
/// rejection-sampled without overlap; throws PlacementFailure after 10000
/// rejected placements.
Scene gen_scene(std::uint64_t seed, const SceneConfig& config);

struct SimResult {
    RadioMap map;   // min-max normalized
    Grid2D dbm;     // clamped dBm grid before normalization
};

/// Free-space path loss plus a fixed per-wall-crossing penalty, rasterized at
/// cell centers. Distance floored at h/2; building interiors take
/// interior_dbm; everything clamped to [floor_dbm, tx_power_dbm].
SimResult simulate_pathloss(const Scene& scene, const PropagationParams& params);

/// Cell = 1 iff its center lies inside a building (low edges inclusive).
BinaryMask building_mask(const Scene& scene);

/// Number of building-boundary crossings of the segment tx -> (x, y).
/// A pass through a rectangle interior counts 2; a tangential graze counts 1.
int wall_crossings(const Scene& scene, double x, double y);

// Line-oriented text serialization: seed=, grid_n=, extent=, tx=, bldg= lines.
void write_scene(const Scene& scene, const std::string& path);
Scene read_scene(const std::string& path);

struct ManifestRow {
    std::uint64_t seed;
    std::string scene_path;
    std::string gt_path;
    std::string mask_path;
};

void write_manifest(const std::vector<ManifestRow>& rows, const std::string& path);
std::vector<ManifestRow> read_manifest(const std::string& path);

} // namespace rmsup
