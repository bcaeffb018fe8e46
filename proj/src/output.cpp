#include "mdtube/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "mdtube/errors.hpp"

namespace mdtube {

namespace fs = std::filesystem;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

namespace {

std::ofstream open_for_write(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

void write_cell_scalars(std::ostream& out, const std::string& name, const std::vector<double>& v) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double x : v) out << format_number(x) << '\n';
}

}  // namespace

void write_errors_csv(std::ostream& out, const ErrorReport& report) {
    out << "schema,study,k,r_max,rho_factor,delta,level,cells,h,"
           "E_u,E_psi,E_q,Et_u,Et_psi,Et_q,"
           "order_u,order_psi,order_q,order_t_u,order_t_psi,order_t_q,iterations,iterations_t\n";
    for (const auto& r : report.rows) {
        out << kErrorsSchema << ',' << r.study << ',' << format_number(r.k) << ',' << format_number(r.r_max) << ','
            << format_number(r.rho_factor) << ',' << (r.delta_correction ? 1 : 0) << ',' << r.level << ','
            << r.cells << ',' << format_number(r.h);
        for (const auto* a : {&r.e, &r.e_tilde, &r.order, &r.order_tilde})
            for (double v : *a) out << ',' << format_number(v);
        out << ',' << r.iterations << ',' << r.iterations_tilde << '\n';
    }
}

void write_transpiration_csv(std::ostream& out, const std::vector<TranspirationRow>& rows) {
    out << "schema,collar_pressure,grid,cells,r_t,collar_flux,relative_mismatch,iterations,damped_steps,"
           "min_interface_pressure,interface_violations\n";
    for (const auto& r : rows)
        out << kTranspirationSchema << ',' << format_number(r.collar_pressure) << ',' << r.grid << ',' << r.cells
            << ',' << format_number(r.r_t) << ',' << format_number(r.collar_flux) << ','
            << format_number(r.relative_mismatch) << ',' << r.iterations << ',' << r.damped_steps << ','
            << format_number(r.min_interface_pressure) << ',' << r.interface_violations << '\n';
}

void write_segments_csv(std::ostream& out, const std::vector<SegmentRow>& rows) {
    out << "schema,collar_pressure,grid,cell,segment,s,depth,radius,u_e,u_hat,q\n";
    for (const auto& r : rows)
        out << kSegmentsSchema << ',' << format_number(r.collar_pressure) << ',' << r.grid << ',' << r.cell << ','
            << r.segment << ',' << format_number(r.s) << ',' << format_number(r.depth) << ','
            << format_number(r.radius) << ',' << format_number(r.u_e) << ',' << format_number(r.u_hat) << ','
            << format_number(r.q) << '\n';
}

void write_bulk_vtk(std::ostream& out, const FieldExport& field) {
    if (!field.grid) throw ConfigError("field '" + field.name + "' has no bulk grid");
    const BulkGrid& g = *field.grid;
    const auto n = g.cells();
    const Vec3 lo = g.lo();
    const Vec3 h = g.spacing();
    out << "# vtk DataFile Version 3.0\n" << field.name << " bulk\nASCII\nDATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << n[0] + 1 << ' ' << n[1] + 1 << ' ' << n[2] + 1 << '\n';
    out << "ORIGIN " << format_number(lo.x) << ' ' << format_number(lo.y) << ' ' << format_number(lo.z) << '\n';
    out << "SPACING " << format_number(h.x) << ' ' << format_number(h.y) << ' ' << format_number(h.z) << '\n';
    out << "CELL_DATA " << g.num_cells() << '\n';
    write_cell_scalars(out, "u", field.u);
    write_cell_scalars(out, "psi", field.psi);
}

void write_network_vtk(std::ostream& out, const FieldExport& field) {
    if (!field.mesh) throw ConfigError("field '" + field.name + "' has no network");
    const NetworkMesh& m = *field.mesh;
    out << "# vtk DataFile Version 3.0\n" << field.name << " network\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << m.num_nodes() << " double\n";
    for (const auto& p : m.nodes)
        out << format_number(p.x) << ' ' << format_number(p.y) << ' ' << format_number(p.z) << '\n';
    out << "LINES " << m.num_cells() << ' ' << 3 * m.num_cells() << '\n';
    for (const auto& c : m.cells) out << "2 " << c.node_a << ' ' << c.node_b << '\n';
    out << "CELL_DATA " << m.num_cells() << '\n';
    std::vector<double> radius;
    for (const auto& c : m.cells) radius.push_back(c.radius);
    write_cell_scalars(out, "radius", radius);
    if (static_cast<int>(field.u_e.size()) == m.num_cells()) write_cell_scalars(out, "u_e", field.u_e);
    if (static_cast<int>(field.u_hat.size()) == m.num_cells()) write_cell_scalars(out, "u_hat", field.u_hat);
    if (static_cast<int>(field.q.size()) == m.num_cells()) write_cell_scalars(out, "q", field.q);
}

std::vector<fs::path> write_outputs(const ScenarioResult& result, const fs::path& directory) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw ConfigError("cannot create output directory " + directory.string() + ": " + ec.message());
    std::vector<fs::path> written;
    auto emit = [&](const fs::path& name, auto&& writer) {
        const fs::path p = directory / name;
        auto out = open_for_write(p);
        writer(out);
        if (!out) throw ConfigError("error writing " + p.string());
        written.push_back(p);
    };

    emit("config.ini", [&](std::ostream& o) { emit_config(o, result.config); });
    emit("errors.csv", [&](std::ostream& o) { write_errors_csv(o, result.errors); });
    emit("transpiration.csv", [&](std::ostream& o) { write_transpiration_csv(o, result.transpiration); });
    emit("segments.csv", [&](std::ostream& o) { write_segments_csv(o, result.segments); });
    if (!result.references_json.empty())
        emit("references.json", [&](std::ostream& o) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& r : result.references_json) arr.push_back(nlohmann::json::parse(r));
            o << arr.dump(2) << '\n';
        });

    for (const auto& f : result.fields) {
        if (result.config.output.vtk) {
            if (f.grid) emit(f.name + "_bulk.vtk", [&](std::ostream& o) { write_bulk_vtk(o, f); });
            if (f.mesh) emit(f.name + "_network.vtk", [&](std::ostream& o) { write_network_vtk(o, f); });
        }
        if (result.config.output.history && !f.history.empty()) {
            const fs::path p = directory / (f.name + "_newton.csv");
            write_history_csv(f.history, p.string());
            written.push_back(p);
        }
    }
    return written;
}

}  // namespace mdtube
