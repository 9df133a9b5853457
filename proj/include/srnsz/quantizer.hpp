#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "srnsz/error.hpp"
#include "srnsz/grid.hpp"

namespace srnsz {

inline constexpr std::uint32_t kDefaultQuantRadius = 32768;

/// Symbol reserved for "value stored exactly in the outlier section".
inline constexpr std::uint32_t kOutlierSymbol = 0;

struct Quantized {
    std::uint32_t symbol = kOutlierSymbol;  // k + R, or 0 for an outlier
    double reconstructed = 0.0;
    [[nodiscard]] bool is_outlier() const noexcept { return symbol == kOutlierSymbol; }
};

/// Linear quantization of `actual - pred` into bins of width 2e.
///
/// k = round((actual - pred) / 2e) with halves rounded away from zero. When
/// |k| < R the symbol is k + R (always in [1, 2R)) and the reconstruction is
/// pred + 2e*k. Otherwise the point is an outlier: symbol 0, reconstruction
/// == actual, value stored exactly.
///
/// `storage` is the precision the reconstruction will eventually be written
/// in: a bin whose reconstruction, once rounded to that precision, misses the
/// bound is turned into an outlier, so the guarantee survives the final cast.
inline Quantized quantize(double pred, double actual, double e, std::uint32_t radius,
                          Precision storage = Precision::f64) {
    if (!(e > 0.0)) throw ConfigError("quantization requires an error bound e > 0");
    const double k = std::round((actual - pred) / (2.0 * e));
    if (std::isfinite(k) && std::fabs(k) < static_cast<double>(radius)) {
        const double recon = pred + 2.0 * e * k;
        if (std::fabs(actual - round_to_precision(recon, storage)) <= e) {
            return {static_cast<std::uint32_t>(static_cast<std::int64_t>(k) + radius), recon};
        }
    }
    return {kOutlierSymbol, actual};
}

/// Exact inverse of quantize's reconstruction.
inline double dequantize(double pred, std::uint32_t symbol, std::optional<double> outlier_value,
                         double e, std::uint32_t radius) {
    if (symbol >= 2ull * radius) throw CorruptStreamError("quantization symbol out of range");
    if (symbol == kOutlierSymbol) {
        if (!outlier_value) throw CorruptStreamError("outlier symbol without a stored value");
        return *outlier_value;
    }
    const auto k = static_cast<double>(static_cast<std::int64_t>(symbol) - static_cast<std::int64_t>(radius));
    return pred + 2.0 * e * k;
}

/// Codes and exactly stored values in emission order.
struct QuantizationStream {
    struct Outlier {
        std::uint64_t ordinal = 0;  // position in `codes`
        double value = 0.0;
    };
    std::vector<std::uint32_t> codes;
    std::vector<Outlier> outliers;
};

}  // namespace srnsz
