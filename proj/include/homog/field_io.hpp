#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "homog/grid.hpp"

namespace homog {

/// On-disk field: `arrays` blocks of N^d values, each row-major over cells
/// (direction 0 fastest); coefficient fields have one block per direction.
///
/// CSV layout: comment header lines starting with '#', then
/// `direction,cell,value` rows. Binary layout (little endian): "HOMOGFLD",
/// u32 version, u32 d, u64 N, f64 R, u64 seed, u32 arrays, u32 + bytes kind,
/// u32 + bytes law JSON, then the f64 values.
struct FieldRecord {
    PeriodicGrid grid;
    std::string kind = "coefficients";
    std::string law;
    std::uint64_t seed = 0;
    std::size_t arrays = 1;
    std::vector<double> values;

    EdgeCoefficientField coefficients() const;
};

enum class FieldFormat { csv, binary };

void write_field(const std::filesystem::path& path, const FieldRecord& record, FieldFormat format);
/// Detects the format from the file's first bytes.
FieldRecord read_field(const std::filesystem::path& path);

/// Shortest-round-trip decimal text with '.' separator and no locale.
std::string format_double(double x);

} // namespace homog
