#pragma once

#include <string>
#include <vector>

#include "pfb/free_boundary.hpp"
#include "pfb/solver.hpp"

namespace pfb {

/// Plain-text lattice dump: first line "nx ny h", then one row per lattice
/// line of space-separated values (full precision). Exterior nodes print 0.
std::string dump_field(const ScalarField& u);

/// Interior mask in the same layout with 0/1 entries.
std::string dump_mask(const GridDomain& g);

/// Parsed lattice dump.
struct FieldDump {
    int nx = 0, ny = 0;
    double h = 0.0;
    std::vector<double> values;
};
FieldDump parse_field_dump(const std::string& text);

/// Attaches dumped values to a matching domain; throws on shape mismatch.
ScalarField attach_field(const DomainPtr& dom, const FieldDump& dump);

/// CSV row "dirichlet,penalty,total,positivity".
std::string energy_csv_row(const EnergyBreakdown& e);

/// Iteration trace: header iter,dirichlet,penalty,total,positivity,toggles.
std::string trace_csv(const std::vector<TraceRow>& trace);

/// fb.csv: node,x,y,flux,nx,ny
std::string fb_csv(const GridDomain& g, const FreeBoundaryReport& rep);

/// density.csv: cx,cy,r,ratio
std::string density_csv(const FreeBoundaryReport& rep);

std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace pfb
