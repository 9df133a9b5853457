#include "srnsz/grid_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

namespace srnsz {

DataGrid decode_raw(std::span<const std::uint8_t> bytes, Precision precision, const Shape& shape) {
    const std::size_t expected = shape.count() * element_bytes(precision);
    if (bytes.size() != expected) {
        throw IngestionError("size mismatch: shape " + to_string(shape) + " as " +
                             to_string(precision) + " needs " + std::to_string(expected) +
                             " bytes, got " + std::to_string(bytes.size()));
    }
    DataGrid::Values values(static_cast<Eigen::Index>(shape.count()));
    if (precision == Precision::f32) {
        for (std::size_t i = 0; i < shape.count(); ++i) {
            float f;
            std::memcpy(&f, bytes.data() + 4 * i, 4);
            values[static_cast<Eigen::Index>(i)] = f;
        }
    } else {
        std::memcpy(values.data(), bytes.data(), expected);
    }
    return DataGrid(shape, std::move(values), precision);
}

std::vector<std::uint8_t> encode_raw(const DataGrid& grid) {
    const auto precision = grid.source_precision();
    std::vector<std::uint8_t> out(grid.size() * element_bytes(precision));
    if (precision == Precision::f32) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto f = static_cast<float>(grid[i]);
            std::memcpy(out.data() + 4 * i, &f, 4);
        }
    } else {
        std::memcpy(out.data(), grid.values().data(), out.size());
    }
    return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open '" + path.string() + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestionError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IngestionError("write to '" + path.string() + "' failed");
}

DataGrid read_raw(const std::filesystem::path& path, Precision precision, const Shape& shape) {
    return decode_raw(read_file(path), precision, shape);
}

void write_raw(const std::filesystem::path& path, const DataGrid& grid) {
    write_file(path, encode_raw(grid));
}

}  // namespace srnsz
