#pragma once

#include <stdexcept>
#include <string>

namespace rmsup {

// One code per contract failure; mirrored one-to-one by the C API status enum.
enum class Errc {
    Ok = 0,
    InvalidArgument,
    BadMagic,
    TruncatedFile,
    DimensionMismatch,
    ValueOutOfRange,
    GridTooSmall,
    NegativePower,
    BadThresholds,
    IndivisibleStride,
    SourceTooSmall,
    PlacementFailure,
    KindMismatch,
    TimeOutOfRange,
    BadTimeStep,
    DegenerateAlphaBar,
    ZeroReference,
    MomentCheckFailed,
    Io,
    Config,
};

const char* errc_name(Errc c) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) {
    throw Error(c, msg);
}

} // namespace rmsup
