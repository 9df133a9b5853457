#pragma once

#include <filesystem>

#include "srnsz/grid.hpp"

namespace srnsz {

/// Reads a headerless little-endian raw grid. The file length must equal
/// shape.count() * element_bytes(precision) exactly.
DataGrid read_raw(const std::filesystem::path& path, Precision precision, const Shape& shape);

/// Decodes raw little-endian bytes into a grid (same rules as read_raw).
DataGrid decode_raw(std::span<const std::uint8_t> bytes, Precision precision, const Shape& shape);

/// Writes the grid in its source precision.
void write_raw(const std::filesystem::path& path, const DataGrid& grid);

std::vector<std::uint8_t> encode_raw(const DataGrid& grid);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace srnsz
