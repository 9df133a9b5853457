#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "srnsz/grid.hpp"

namespace srnsz {

enum class FieldKind : std::uint8_t {
    gaussian_mixture_bumps,  // smooth, climate-like
    band_limited_fourier,    // multiscale, turbulence-like
    advected_vortex,         // swirled stripes with sharp filaments
    piecewise_fronts,        // near-discontinuous fronts on a smooth background
};

std::string to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& s);

/// Recipe for one synthetic field. Coordinates run over [0, 1] per axis.
struct FieldSpec {
    FieldKind kind = FieldKind::gaussian_mixture_bumps;
    Shape shape{129, 129};
    std::uint64_t seed = 1;
    int components = 12;         // bumps, Fourier modes, vortices or fronts
    double max_frequency = 8.0;  // Fourier and stripe wavenumber cap
    double smoothness = 1.5;     // Fourier amplitude decay exponent
    double sharpness = 40.0;     // front steepness
};

nlohmann::json to_json(const FieldSpec& spec);
FieldSpec field_spec_from_json(const nlohmann::json& j);

/// Deterministic for a given spec: parameters come from mt19937_64 in a fixed
/// draw order, values are evaluated in double and stored rounded to f32
/// (tagged Precision::f32).
DataGrid generate(const FieldSpec& spec);

}  // namespace srnsz
