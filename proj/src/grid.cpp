#include "rmsup/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

namespace rmsup {

const char* errc_name(Errc c) noexcept {
    switch (c) {
        case Errc::Ok: return "Ok";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::BadMagic: return "BadMagic";
        case Errc::TruncatedFile: return "TruncatedFile";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::ValueOutOfRange: return "ValueOutOfRange";
        case Errc::GridTooSmall: return "GridTooSmall";
        case Errc::NegativePower: return "NegativePower";
        case Errc::BadThresholds: return "BadThresholds";
        case Errc::IndivisibleStride: return "IndivisibleStride";
        case Errc::SourceTooSmall: return "SourceTooSmall";
        case Errc::PlacementFailure: return "PlacementFailure";
        case Errc::KindMismatch: return "KindMismatch";
        case Errc::TimeOutOfRange: return "TimeOutOfRange";
        case Errc::BadTimeStep: return "BadTimeStep";
        case Errc::DegenerateAlphaBar: return "DegenerateAlphaBar";
        case Errc::ZeroReference: return "ZeroReference";
        case Errc::MomentCheckFailed: return "MomentCheckFailed";
        case Errc::Io: return "Io";
        case Errc::Config: return "Config";
    }
    return "Unknown";
}

Grid2D::Grid2D(int width, int height, double spacing_h, std::vector<double> values)
    : width_(width), height_(height), spacing_(spacing_h), values_(std::move(values)) {
    if (width_ <= 0 || height_ <= 0)
        fail(Errc::InvalidArgument, "Grid2D: dimensions must be positive");
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_))
        fail(Errc::InvalidArgument, "Grid2D: spacing must be a positive finite real");
    if (values_.size() != std::size_t(width_) * std::size_t(height_))
        fail(Errc::InvalidArgument, "Grid2D: values length != width*height");
    for (double v : values_)
        if (!std::isfinite(v))
            fail(Errc::InvalidArgument, "Grid2D: non-finite value");
}

Grid2D Grid2D::filled(int width, int height, double spacing_h, double value) {
    if (width <= 0 || height <= 0)
        fail(Errc::InvalidArgument, "Grid2D: dimensions must be positive");
    return Grid2D(width, height, spacing_h,
                  std::vector<double>(std::size_t(width) * std::size_t(height), value));
}

std::pair<double, double> Grid2D::minmax() const {
    auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    return {*lo, *hi};
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    if (width_ <= 0 || height_ <= 0)
        fail(Errc::InvalidArgument, "BinaryMask: dimensions must be positive");
    if (bits_.size() != std::size_t(width_) * std::size_t(height_))
        fail(Errc::InvalidArgument, "BinaryMask: bits length != width*height");
    for (auto b : bits_)
        if (b > 1)
            fail(Errc::InvalidArgument, "BinaryMask: element not 0/1");
}

BinaryMask BinaryMask::zeros(int width, int height) {
    return BinaryMask(width, height,
                      std::vector<std::uint8_t>(std::size_t(width) * std::size_t(height), 0));
}

std::size_t BinaryMask::count_ones() const {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
}

AmplitudeMap::AmplitudeMap(Grid2D grid) : grid_(std::move(grid)) {
    for (double v : grid_.values())
        if (v < 0.0)
            fail(Errc::InvalidArgument, "AmplitudeMap: negative amplitude");
}

RadioMap::RadioMap(Grid2D grid, std::pair<double, double> tx_pos_m, double freq_hz,
                   std::pair<double, double> norm_bounds_dbm)
    : grid_(std::move(grid)), tx_pos_(tx_pos_m), freq_hz_(freq_hz), bounds_(norm_bounds_dbm) {
    for (double v : grid_.values())
        if (v < 0.0 || v > 1.0)
            fail(Errc::ValueOutOfRange, "RadioMap: power outside [0,1]");
    const double ext_x = grid_.width() * grid_.spacing();
    const double ext_y = grid_.height() * grid_.spacing();
    if (tx_pos_.first < 0.0 || tx_pos_.first > ext_x || tx_pos_.second < 0.0 ||
        tx_pos_.second > ext_y)
        fail(Errc::InvalidArgument, "RadioMap: transmitter outside grid extent");
    if (!(freq_hz_ > 0.0))
        fail(Errc::InvalidArgument, "RadioMap: frequency must be positive");
    if (!(bounds_.first < bounds_.second))
        fail(Errc::InvalidArgument, "RadioMap: norm bounds require p_min < p_max");
}

Normalized normalize_minmax(const Grid2D& g) {
    auto [lo, hi] = g.minmax();
    std::vector<double> out(g.size());
    if (hi == lo) {
        // degenerate constant grid: all zeros, bounds collapse
        return {Grid2D(g.width(), g.height(), g.spacing(), std::move(out)), lo, lo};
    }
    const double span = hi - lo;
    auto src = g.values();
    for (std::size_t k = 0; k < src.size(); ++k) out[k] = (src[k] - lo) / span;
    return {Grid2D(g.width(), g.height(), g.spacing(), std::move(out)), lo, hi};
}

Grid2D denormalize(const Grid2D& g, double lo, double hi) {
    std::vector<double> out(g.size());
    auto src = g.values();
    for (std::size_t k = 0; k < src.size(); ++k) out[k] = lo + src[k] * (hi - lo);
    return Grid2D(g.width(), g.height(), g.spacing(), std::move(out));
}

AmplitudeMap amplitude(const Grid2D& power) {
    std::vector<double> out(power.size());
    auto src = power.values();
    for (std::size_t k = 0; k < src.size(); ++k) {
        if (src[k] < 0.0)
            fail(Errc::NegativePower, "amplitude: negative power value");
        out[k] = std::sqrt(src[k]);
    }
    return AmplitudeMap(Grid2D(power.width(), power.height(), power.spacing(), std::move(out)));
}

AmplitudeMap amplitude(const RadioMap& power) { return amplitude(power.grid()); }

Grid2D mask_to_grid(const BinaryMask& m, double spacing_h) {
    std::vector<double> out(m.size());
    auto bits = m.bits();
    for (std::size_t k = 0; k < bits.size(); ++k) out[k] = double(bits[k]);
    return Grid2D(m.width(), m.height(), spacing_h, std::move(out));
}

namespace {

constexpr char kMagic[4] = {'R', 'M', 'G', '1'};

void put_u32(std::string& buf, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) buf.push_back(char((v >> (8 * k)) & 0xff));
}

void put_f64(std::string& buf, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) buf.push_back(char((bits >> (8 * k)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= std::uint32_t(p[k]) << (8 * k);
    return v;
}

double get_f64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= std::uint64_t(p[k]) << (8 * k);
    return std::bit_cast<double>(v);
}

} // namespace

void write_rmg(const Grid2D& g, const std::string& path) {
    std::string buf;
    buf.reserve(20 + g.size() * 8);
    buf.append(kMagic, 4);
    put_u32(buf, std::uint32_t(g.width()));
    put_u32(buf, std::uint32_t(g.height()));
    put_f64(buf, g.spacing());
    for (double v : g.values()) put_f64(buf, v);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(Errc::Io, "write_rmg: cannot open " + path);
    out.write(buf.data(), std::streamsize(buf.size()));
    if (!out)
        fail(Errc::Io, "write_rmg: short write to " + path);
}

Grid2D read_rmg(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(Errc::Io, "read_rmg: cannot open " + path);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (raw.size() < 4 || std::memcmp(raw.data(), kMagic, 4) != 0)
        fail(Errc::BadMagic, "read_rmg: bad magic in " + path);
    if (raw.size() < 20)
        fail(Errc::TruncatedFile, "read_rmg: truncated header in " + path);

    const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
    const std::uint32_t w = get_u32(p + 4);
    const std::uint32_t h = get_u32(p + 8);
    const double spacing = get_f64(p + 12);
    if (w == 0 || h == 0 || w > (1u << 24) || h > (1u << 24))
        fail(Errc::DimensionMismatch, "read_rmg: implausible dimensions in " + path);

    const std::size_t need = 20 + std::size_t(w) * h * 8;
    if (raw.size() < need)
        fail(Errc::TruncatedFile, "read_rmg: truncated payload in " + path);
    if (raw.size() != need)
        fail(Errc::DimensionMismatch, "read_rmg: payload size does not match header in " + path);

    std::vector<double> values(std::size_t(w) * h);
    for (std::size_t k = 0; k < values.size(); ++k) values[k] = get_f64(p + 20 + 8 * k);
    return Grid2D(int(w), int(h), spacing, std::move(values));
}

namespace {

void write_pgm_bytes(int width, int height, const std::vector<unsigned char>& pix,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(Errc::Io, "write_pgm: cannot open " + path);
    char header[64];
    int n = std::snprintf(header, sizeof header, "P5\n%d %d\n255\n", width, height);
    out.write(header, n);
    out.write(reinterpret_cast<const char*>(pix.data()), std::streamsize(pix.size()));
    if (!out)
        fail(Errc::Io, "write_pgm: short write to " + path);
}

} // namespace

void write_pgm(const Grid2D& g, const std::string& path) {
    std::vector<unsigned char> pix(g.size());
    auto src = g.values();
    for (std::size_t k = 0; k < src.size(); ++k) {
        if (src[k] < 0.0 || src[k] > 1.0)
            fail(Errc::ValueOutOfRange, "write_pgm: grid value outside [0,1]");
        pix[k] = (unsigned char)(std::floor(255.0 * src[k] + 0.5)); // round half up
    }
    write_pgm_bytes(g.width(), g.height(), pix, path);
}

void write_pgm(const BinaryMask& m, const std::string& path) {
    std::vector<unsigned char> pix(m.size());
    auto bits = m.bits();
    for (std::size_t k = 0; k < bits.size(); ++k) pix[k] = bits[k] ? 255 : 0;
    write_pgm_bytes(m.width(), m.height(), pix, path);
}

} // namespace rmsup
