#include "pfb/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pfb {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string dump_field(const ScalarField& u) {
    const GridDomain& g = u.dom();
    std::string out;
    out.reserve(static_cast<std::size_t>(g.node_count()) * 12);
    out += std::to_string(g.nx) + " " + std::to_string(g.ny) + " " + format_double(g.h) +
           "\n";
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (i) out += ' ';
            const int node = g.idx(i, j);
            out += format_double(g.in_closure(node) ? u[node] : 0.0);
        }
        out += '\n';
    }
    return out;
}

std::string dump_mask(const GridDomain& g) {
    std::string out;
    out += std::to_string(g.nx) + " " + std::to_string(g.ny) + " " + format_double(g.h) +
           "\n";
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (i) out += ' ';
            out += g.is_interior(g.idx(i, j)) ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

FieldDump parse_field_dump(const std::string& text) {
    std::istringstream in(text);
    FieldDump dump;
    if (!(in >> dump.nx >> dump.ny >> dump.h))
        throw std::runtime_error("parse_field_dump: bad header");
    dump.values.resize(static_cast<std::size_t>(dump.nx) * dump.ny);
    for (auto& v : dump.values)
        if (!(in >> v)) throw std::runtime_error("parse_field_dump: truncated dump");
    return dump;
}

ScalarField attach_field(const DomainPtr& dom, const FieldDump& dump) {
    if (dom->nx != dump.nx || dom->ny != dump.ny || dom->h != dump.h)
        throw std::runtime_error("attach_field: lattice shape mismatch");
    ScalarField u(dom, 0.0);
    u.data = dump.values;
    for (int node = 0; node < dom->node_count(); ++node)
        if (!dom->in_closure(node)) u.data[node] = 0.0;
    return u;
}

std::string energy_csv_row(const EnergyBreakdown& e) {
    return format_double(e.dirichlet) + "," + format_double(e.penalty) + "," +
           format_double(e.total) + "," + format_double(e.positivity);
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
    std::string out = "iter,dirichlet,penalty,total,positivity,toggles\n";
    for (const auto& row : trace)
        out += std::to_string(row.iter) + "," + energy_csv_row(row.energy) + "," +
               std::to_string(row.toggles) + "\n";
    return out;
}

std::string fb_csv(const GridDomain& g, const FreeBoundaryReport& rep) {
    std::string out = "node,x,y,flux,nx,ny\n";
    for (std::size_t k = 0; k < rep.fb_nodes.size(); ++k) {
        const int node = rep.fb_nodes[k];
        const double flux = k < rep.flux.size() ? rep.flux[k] : 0.0;
        out += std::to_string(node) + "," + format_double(g.pos_x(node % g.nx)) + "," +
               format_double(g.pos_y(node / g.nx)) + "," + format_double(flux) + "," +
               format_double(rep.normals[k][0]) + "," + format_double(rep.normals[k][1]) +
               "\n";
    }
    return out;
}

std::string density_csv(const FreeBoundaryReport& rep) {
    std::string out = "cx,cy,r,ratio\n";
    for (const auto& row : rep.density_table)
        out += format_double(row.cx) + "," + format_double(row.cy) + "," +
               format_double(row.r) + "," + format_double(row.ratio) + "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace pfb
