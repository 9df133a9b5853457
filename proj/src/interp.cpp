#include "srnsz/interp.hpp"

#include <cmath>

namespace srnsz {

std::string to_string(InterpMethod m) {
    switch (m) {
        case InterpMethod::linear: return "linear";
        case InterpMethod::cubic_1d: return "cubic_1d";
        case InterpMethod::multidim_spline: return "multidim_spline";
    }
    return "unknown";
}

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::size_t level_point_count(const Index3& extents, std::size_t stride) {
    std::size_t n = 0;
    for (const auto& pass : parity_passes(stride)) n += count_points(pass, extents);
    return n;
}

double level_sse(const LatticeView<const double>& view, std::size_t stride, InterpMethod method,
                 std::uint64_t modulus, std::size_t& sampled) {
    double sse = 0.0;
    sampled = 0;
    for (const auto& pass : passes_for(method, stride)) {
        for_each_point(pass, view.extents(), [&](const Index3& p, std::size_t flat) {
            if (modulus > 1 && splitmix64(flat) % modulus != 0) return;
            const double err = predict_interp_point(view, pass, p, stride, method) - view[flat];
            sse += err * err;
            ++sampled;
        });
    }
    return sse;
}

}  // namespace

InterpChoice select_interpolator(std::span<const double> reference, const Index3& extents,
                                 std::size_t stride) {
    LatticeView<const double> view(reference, extents);
    const std::size_t total = level_point_count(extents, stride);
    const std::uint64_t modulus =
        total > kSelectionSampleTarget ? total / kSelectionSampleTarget : 1;

    InterpChoice choice;
    choice.sse_cubic = level_sse(view, stride, InterpMethod::cubic_1d, modulus, choice.sampled_points);
    std::size_t dummy = 0;
    choice.sse_linear = level_sse(view, stride, InterpMethod::linear, modulus, dummy);
    choice.sse_multidim = level_sse(view, stride, InterpMethod::multidim_spline, modulus, dummy);

    choice.method = InterpMethod::cubic_1d;
    double best = choice.sse_cubic;
    if (choice.sse_linear < best) {
        best = choice.sse_linear;
        choice.method = InterpMethod::linear;
    }
    if (choice.sse_multidim < best) choice.method = InterpMethod::multidim_spline;
    return choice;
}

}  // namespace srnsz
