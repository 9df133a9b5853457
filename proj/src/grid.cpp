#include "srnsz/grid.hpp"

#include <cmath>

namespace srnsz {

std::string to_string(Precision p) { return p == Precision::f32 ? "f32" : "f64"; }

Precision precision_from_string(const std::string& s) {
    if (s == "f32" || s == "float" || s == "float32") return Precision::f32;
    if (s == "f64" || s == "double" || s == "float64") return Precision::f64;
    throw ConfigError("unknown dtype '" + s + "' (expected f32 or f64)");
}

std::string to_string(const Shape& shape) {
    std::string s;
    for (std::size_t d = 0; d < shape.ndims(); ++d) {
        if (d) s += 'x';
        s += std::to_string(shape[d]);
    }
    return s;
}

std::string to_string(ErrorBoundMode m) {
    return m == ErrorBoundMode::absolute ? "abs" : "rel";
}

ErrorBoundMode error_bound_mode_from_string(const std::string& s) {
    if (s == "abs" || s == "absolute") return ErrorBoundMode::absolute;
    if (s == "rel" || s == "relative" || s == "vr") return ErrorBoundMode::value_range_relative;
    throw ConfigError("unknown error-bound mode '" + s + "' (expected abs or rel)");
}

ErrorBoundSpec ErrorBoundSpec::resolve(ErrorBoundMode mode, double epsilon, const DataGrid& grid) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("error bound must be a finite nonnegative number");
    }
    ErrorBoundSpec spec{mode, epsilon, epsilon};
    if (mode == ErrorBoundMode::value_range_relative) spec.resolved_e = epsilon * vrange(grid);
    return spec;
}

}  // namespace srnsz
