#pragma once

#include <string>

#include <json.hpp>

#include "conflab/field.hpp"
#include "conflab/grid.hpp"

namespace conflab {

/// Parse a JSON document from disk; parse problems raise Config errors.
nlohmann::ordered_json read_json_file(const std::string& path);

/// On-disk field dump: <base>.json header describing the grid plus
/// <base>.f64 sidecar holding the node values as 64-bit little-endian
/// IEEE-754 in row-major node order (last axis fastest).
struct DumpPaths {
    std::string header;
    std::string sidecar;
};

DumpPaths write_field_dump(const ScalarField& f, const std::string& name,
                           const std::string& base);

/// Rebuild the grid a dump was written on (slab or torus per the periodic
/// flags in the header).
ChartGrid grid_from_dump_header(const std::string& headerPath);

/// Read the sidecar named by a header, checked against the given grid.
ScalarField read_field_dump(const ChartGrid& grid, const std::string& headerPath);

/// Full-field CSV export: one row per node, index coordinates then the value,
/// no header row.
void write_field_csv(const ScalarField& f, const std::string& path);

/// Mid-plane slice across the last axis: remaining physical coordinates plus
/// the value, one row per lateral node, no header row (so a 16x16x17 slab
/// slices to exactly 256 rows).
void write_midplane_csv(const ScalarField& f, const std::string& path);

}  // namespace conflab
