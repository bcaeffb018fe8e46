#pragma once

// CSV tables, legacy VTK files and the run directory layout.
//
// Every CSV starts with a `schema` column holding the table's schema version,
// so readers can reject files whose layout they do not know. Numbers are
// written in shortest round-trip form; NaN is written as "nan".

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mdtube/scenarios.hpp"

namespace mdtube {

inline constexpr int kErrorsSchema = 1;
inline constexpr int kTranspirationSchema = 1;
inline constexpr int kSegmentsSchema = 1;

std::string format_number(double v);

void write_errors_csv(std::ostream& out, const ErrorReport& report);
void write_transpiration_csv(std::ostream& out, const std::vector<TranspirationRow>& rows);
void write_segments_csv(std::ostream& out, const std::vector<SegmentRow>& rows);

/// Bulk cell data (u, psi) as STRUCTURED_POINTS. Radial and planar grids are
/// written as nx x 1 x 1 and nx x ny x 1 cell blocks.
void write_bulk_vtk(std::ostream& out, const FieldExport& field);
/// Network cells as POLYDATA lines with radius, u_e, u_hat and q cell data.
void write_network_vtk(std::ostream& out, const FieldExport& field);

/// Writes errors.csv, transpiration.csv, segments.csv, config.ini (the
/// effective config), references.json and, per output settings, VTK files and
/// Newton histories. Returns the paths written.
std::vector<std::filesystem::path> write_outputs(const ScenarioResult& result,
                                                 const std::filesystem::path& directory);

}  // namespace mdtube
