#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rmsup/error.hpp"

namespace rmsup {

/// Dense 2D scalar field, row-major, with a physical cell spacing in meters.
/// Index convention everywhere: i = row (y), j = column (x), both 0-based.
/// Values are validated finite at construction; spacing must be positive.
class Grid2D {
public:
    Grid2D(int width, int height, double spacing_h, std::vector<double> values);

    /// Grid of a single repeated value.
    static Grid2D filled(int width, int height, double spacing_h, double value);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double spacing() const noexcept { return spacing_; }
    std::size_t size() const noexcept { return values_.size(); }

    double at(int i, int j) const { return values_[std::size_t(i) * width_ + j]; }
    double operator[](std::size_t idx) const { return values_[idx]; }

    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& vec() const noexcept { return values_; }

    /// Min and max over all cells.
    std::pair<double, double> minmax() const;

    bool same_shape(const Grid2D& o) const noexcept {
        return width_ == o.width_ && height_ == o.height_;
    }

private:
    int width_;
    int height_;
    double spacing_;
    std::vector<double> values_;
};

/// 0/1 grid used for K maps, Canny/LBP edges, building masks, and IOU.
class BinaryMask {
public:
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    static BinaryMask zeros(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }

    std::uint8_t at(int i, int j) const { return bits_[std::size_t(i) * width_ + j]; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    std::size_t count_ones() const;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

/// Nonnegative amplitude field A = sqrt(I).
class AmplitudeMap {
public:
    explicit AmplitudeMap(Grid2D grid);

    const Grid2D& grid() const noexcept { return grid_; }

private:
    Grid2D grid_;
};

/// Normalized power map I in [0,1] plus transmitter metadata and the dBm
/// bounds used for normalization, so the map is exactly denormalizable.
class RadioMap {
public:
    RadioMap(Grid2D grid, std::pair<double, double> tx_pos_m, double freq_hz,
             std::pair<double, double> norm_bounds_dbm);

    const Grid2D& grid() const noexcept { return grid_; }
    std::pair<double, double> tx_pos() const noexcept { return tx_pos_; }
    double freq_hz() const noexcept { return freq_hz_; }
    std::pair<double, double> norm_bounds() const noexcept { return bounds_; }

private:
    Grid2D grid_;
    std::pair<double, double> tx_pos_;
    double freq_hz_;
    std::pair<double, double> bounds_;
};

struct Normalized {
    Grid2D grid;    // values in [0,1]
    double lo;      // input min
    double hi;      // input max (== lo for a constant input)
};

/// Min-max normalization to [0,1]. A constant input maps to all zeros with
/// bounds (min, min); callers detect the degenerate case via lo == hi.
Normalized normalize_minmax(const Grid2D& g);

/// Inverse of normalize_minmax for the non-degenerate case.
Grid2D denormalize(const Grid2D& g, double lo, double hi);

/// Elementwise sqrt of a power grid. Throws NegativePower on any value < 0.
AmplitudeMap amplitude(const Grid2D& power);
AmplitudeMap amplitude(const RadioMap& power);

Grid2D mask_to_grid(const BinaryMask& m, double spacing_h);

// RMG raw grid format, little-endian, bit-exact round trip:
//   magic "RMG1" | width u32 | height u32 | spacing f64 | width*height f64
void write_rmg(const Grid2D& g, const std::string& path);
Grid2D read_rmg(const std::string& path);

// 8-bit binary PGM (P5), maxval 255, pixel = round-half-up(255 * value).
void write_pgm(const Grid2D& g, const std::string& path);
void write_pgm(const BinaryMask& m, const std::string& path);

} // namespace rmsup
