#include "srnsz/metrics.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace srnsz {

namespace {

void require_same_shape(const DataGrid& x, const DataGrid& x_prime) {
    if (x.shape() != x_prime.shape()) {
        throw DomainError("shape mismatch: " + to_string(x.shape()) + " vs " + to_string(x_prime.shape()));
    }
}

/// Fixed binary tree over [lo, hi) with 64-element leaves.
double pairwise_sq_sum(const double* a, const double* b, std::size_t n) {
    if (n <= 64) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = a[i] - b[i];
            s += d * d;
        }
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sq_sum(a, b, half) + pairwise_sq_sum(a + half, b + half, n - half);
}

}  // namespace

double compression_ratio(std::uint64_t original_bytes, std::uint64_t compressed_bytes) {
    if (compressed_bytes == 0) throw DomainError("compression ratio of a zero-byte artifact");
    return static_cast<double>(original_bytes) / static_cast<double>(compressed_bytes);
}

double bit_rate(std::uint64_t element_count, std::uint64_t compressed_bytes) {
    if (element_count == 0) throw DomainError("bit rate of an empty grid");
    return 8.0 * static_cast<double>(compressed_bytes) / static_cast<double>(element_count);
}

double mse(const DataGrid& x, const DataGrid& x_prime) {
    require_same_shape(x, x_prime);
    if (x.empty()) throw DomainError("mse of an empty grid");
    return pairwise_sq_sum(x.values().data(), x_prime.values().data(), x.size()) / static_cast<double>(x.size());
}

double psnr(const DataGrid& x, const DataGrid& x_prime) {
    const double err = mse(x, x_prime);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    const double range = vrange(x);
    if (range == 0.0) throw DomainError("PSNR undefined: constant input differs from its reconstruction");
    return 20.0 * std::log10(range) - 10.0 * std::log10(err);
}

double max_abs_error(const DataGrid& x, const DataGrid& x_prime) {
    require_same_shape(x, x_prime);
    return (x.values() - x_prime.values()).abs().maxCoeff();
}

ErrorHistogram error_histogram(const DataGrid& x, const DataGrid& x_prime, double e, std::size_t bins) {
    require_same_shape(x, x_prime);
    if (bins == 0) throw DomainError("histogram needs at least one bin");
    if (!(e >= 0.0)) throw DomainError("histogram bound must be >= 0");
    ErrorHistogram h{e, std::vector<std::uint64_t>(bins, 0), 0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x_prime[i] - x[i];
        if (std::abs(d) > e) {
            ++h.violations;
            continue;
        }
        std::size_t bin = bins / 2;
        if (e > 0.0) {
            const double pos = (d + e) / (2 * e) * static_cast<double>(bins);
            bin = std::min(static_cast<std::size_t>(std::max(pos, 0.0)), bins - 1);
        }
        ++h.counts[bin];
    }
    return h;
}

EvalRecord evaluate(const DataGrid& original, const DataGrid& reconstruction, std::uint64_t compressed_bytes,
                    double resolved_e) {
    EvalRecord r;
    r.resolved_e = resolved_e;
    r.element_count = original.size();
    r.element_bits = element_bits(original.source_precision());
    r.original_bytes = r.element_count * element_bytes(original.source_precision());
    r.compressed_bytes = compressed_bytes;
    r.compression_ratio = compression_ratio(r.original_bytes, compressed_bytes);
    r.bit_rate = bit_rate(r.element_count, compressed_bytes);
    r.psnr = psnr(original, reconstruction);
    r.max_abs_error = max_abs_error(original, reconstruction);
    r.violations = error_histogram(original, reconstruction, resolved_e, 1).violations;
    return r;
}

std::string format_metric(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_eval_csv_header(std::ostream& out) {
    out << "name,epsilon,e,CR,bit_rate,psnr,max_err,violations,seconds_compress,seconds_decompress\n";
}

void write_eval_csv_row(std::ostream& out, const EvalRecord& r) {
    out << r.name << ',' << format_metric(r.epsilon) << ',' << format_metric(r.resolved_e) << ','
        << format_metric(r.compression_ratio) << ',' << format_metric(r.bit_rate) << ',' << format_metric(r.psnr)
        << ',' << format_metric(r.max_abs_error) << ',' << r.violations << ',' << format_metric(r.seconds_compress)
        << ',' << format_metric(r.seconds_decompress) << '\n';
}

void write_eval_csv(std::ostream& out, const std::vector<EvalRecord>& records) {
    write_eval_csv_header(out);
    for (const auto& r : records) write_eval_csv_row(out, r);
}

void write_histogram_csv(std::ostream& out, const ErrorHistogram& h) {
    out << "bin_center,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out << format_metric(h.bin_center(i)) << ',' << h.counts[i] << '\n';
    }
}

}  // namespace srnsz
