#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "srnsz/grid.hpp"

namespace srnsz {

/// original / compressed. Throws DomainError when compressed_bytes == 0.
double compression_ratio(std::uint64_t original_bytes, std::uint64_t compressed_bytes);

/// Compressed bits per input element: 8 * compressed_bytes / element_count.
double bit_rate(std::uint64_t element_count, std::uint64_t compressed_bytes);

/// Mean squared error, summed pairwise for a fixed reduction order.
double mse(const DataGrid& x, const DataGrid& x_prime);

/// 20 log10(vrange(x)) - 10 log10(mse). +inf when the grids are equal; a
/// constant x that differs from x_prime has no defined PSNR (DomainError).
double psnr(const DataGrid& x, const DataGrid& x_prime);

double max_abs_error(const DataGrid& x, const DataGrid& x_prime);

/// Counts of x' - x over `counts.size()` uniform bins on [-e, e]. Samples
/// with |x' - x| > e are counted as violations and not binned.
struct ErrorHistogram {
    double bound = 0.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t violations = 0;

    [[nodiscard]] double bin_width() const { return 2 * bound / static_cast<double>(counts.size()); }
    [[nodiscard]] double bin_center(std::size_t i) const {
        return -bound + (static_cast<double>(i) + 0.5) * bin_width();
    }
};

ErrorHistogram error_histogram(const DataGrid& x, const DataGrid& x_prime, double e, std::size_t bins);

/// One codec run on one input at one error bound.
struct EvalRecord {
    std::string name;
    double epsilon = 0.0;
    double resolved_e = 0.0;
    std::uint64_t element_count = 0;
    unsigned element_bits = 32;
    std::uint64_t original_bytes = 0;
    std::uint64_t compressed_bytes = 0;
    double compression_ratio = 0.0;
    double bit_rate = 0.0;
    double psnr = 0.0;
    double max_abs_error = 0.0;
    std::uint64_t violations = 0;
    double seconds_compress = 0.0;
    double seconds_decompress = 0.0;
};

/// Fills every field of an EvalRecord except the name, epsilon and timings.
EvalRecord evaluate(const DataGrid& original, const DataGrid& reconstruction, std::uint64_t compressed_bytes,
                    double resolved_e);

/// "inf" / "-inf" for infinities, shortest round-trip decimal otherwise.
std::string format_metric(double v);

void write_eval_csv_header(std::ostream& out);
void write_eval_csv_row(std::ostream& out, const EvalRecord& record);
void write_eval_csv(std::ostream& out, const std::vector<EvalRecord>& records);
void write_histogram_csv(std::ostream& out, const ErrorHistogram& histogram);

}  // namespace srnsz
