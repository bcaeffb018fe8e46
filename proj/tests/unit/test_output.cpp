#include <gtest/gtest.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "mdtube/output.hpp"

using namespace mdtube;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::size_t columns(const std::string& line) { return 1 + std::count(line.begin(), line.end(), ','); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScenarioConfig tiny_single_tube() {
    auto cfg = default_config(ScenarioKind::SingleTube);
    cfg.grid.levels = 3;
    cfg.study.k_values = {1.0};
    return cfg;
}

}  // namespace

TEST(Output, NumbersRoundTrip) {
    for (double v : {0.0, 1.0, -2.5, 0.1 + 0.2, 1e-300, 6.02214076e23, std::numeric_limits<double>::denorm_min()}) {
        const auto s = format_number(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        EXPECT_EQ(back, v) << s;
    }
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Output, OrdersComeFromConsecutiveLevelsOfOneCase) {
    ErrorReport rep;
    for (int level = 0; level < 3; ++level) {
        ErrorRow r;
        r.study = "s";
        r.k = 1.0;
        r.level = level;
        r.e = {std::ldexp(1.0, -2 * level), std::ldexp(1.0, -level), 0.0};
        rep.rows.push_back(r);
    }
    ErrorRow other = rep.rows[1];
    other.k = 5.0;
    other.level = 1;
    rep.rows.push_back(other);
    compute_orders(rep);
    EXPECT_TRUE(std::isnan(rep.rows[0].order[0]));
    EXPECT_DOUBLE_EQ(rep.rows[1].order[0], 2.0);
    EXPECT_DOUBLE_EQ(rep.rows[2].order[1], 1.0);
    EXPECT_TRUE(std::isnan(rep.rows[2].order[2]));  // zero error has no order
    EXPECT_TRUE(std::isnan(rep.rows[2].order_tilde[0]));
    EXPECT_TRUE(std::isnan(rep.rows[3].order[0]));  // no level 0 for k = 5
}

TEST(Output, CsvHeadersAndSchemaColumn) {
    ErrorReport rep;
    ErrorRow r;
    r.study = "single_tube";
    r.level = 2;
    r.cells = 64;
    r.h = 0.03125;
    r.e = {1e-3, 2e-3, 3e-3};
    rep.rows = {r, r};
    std::ostringstream e;
    write_errors_csv(e, rep);
    auto lines = lines_of(e.str());
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0],
              "schema,study,k,r_max,rho_factor,delta,level,cells,h,E_u,E_psi,E_q,Et_u,Et_psi,Et_q,order_u,"
              "order_psi,order_q,order_t_u,order_t_psi,order_t_q,iterations,iterations_t");
    EXPECT_EQ(lines[1].substr(0, 14), std::to_string(kErrorsSchema) + ",single_tube,");
    EXPECT_EQ(columns(lines[1]), columns(lines[0]));

    std::ostringstream t;
    write_transpiration_csv(t, {TranspirationRow{-5e5, "20x20x20", 8000, -1e-10, -1e-10, 0, 7, 1, -4e5, 0}});
    lines = lines_of(t.str());
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0],
              "schema,collar_pressure,grid,cells,r_t,collar_flux,relative_mismatch,iterations,damped_steps,"
              "min_interface_pressure,interface_violations");
    EXPECT_EQ(lines[1], "1,-5e+05,20x20x20,8000,-1e-10,-1e-10,0,7,1,-4e+05,0");

    std::ostringstream s;
    write_segments_csv(s, {SegmentRow{-5e5, "20x20x20", 3, 1, 0.01, 0.01, 0.001, -5e5, -1e5, -2e-12}});
    lines = lines_of(s.str());
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], "schema,collar_pressure,grid,cell,segment,s,depth,radius,u_e,u_hat,q");
    EXPECT_EQ(columns(lines[1]), columns(lines[0]));
}

TEST(Output, VtkFilesAreWellFormed) {
    auto grid = std::make_shared<BulkGrid>(BulkGrid::cartesian({0, 0, 0}, {1, 2, 3}, 2, 2, 3));
    TubeNetwork net;
    net.add_node(0, {0.5, 1, 3});
    net.add_node(1, {0.5, 1, 1});
    net.add_node(2, {0.2, 0.5, 0.5});
    net.add_segment(0, 0, 1, 0.01, 3, 1, 1);
    net.add_segment(1, 1, 2, 0.01, 3, 1, 1);
    auto mesh = std::make_shared<NetworkMesh>(discretize(net, 1.0));
    FieldExport f;
    f.name = "case";
    f.grid = grid;
    f.u.assign(grid->num_cells(), 0.25);
    f.psi.assign(grid->num_cells(), 0.5);
    f.mesh = mesh;
    const auto nc = mesh->cells.size();
    f.u_e.assign(nc, 0.1);
    f.u_hat.assign(nc, 0.2);
    f.q.assign(nc, -0.3);

    std::ostringstream b;
    write_bulk_vtk(b, f);
    const auto bl = lines_of(b.str());
    EXPECT_EQ(bl[0], "# vtk DataFile Version 3.0");
    EXPECT_EQ(bl[2], "ASCII");
    EXPECT_EQ(bl[3], "DATASET STRUCTURED_POINTS");
    EXPECT_NE(b.str().find("DIMENSIONS 3 3 4"), std::string::npos);
    EXPECT_NE(b.str().find("SPACING 0.5 1 1"), std::string::npos);
    EXPECT_NE(b.str().find("CELL_DATA 12"), std::string::npos);
    EXPECT_NE(b.str().find("SCALARS psi double 1"), std::string::npos);

    std::ostringstream n;
    write_network_vtk(n, f);
    const auto text = n.str();
    EXPECT_NE(text.find("DATASET POLYDATA"), std::string::npos);
    EXPECT_NE(text.find("LINES " + std::to_string(nc) + " " + std::to_string(3 * nc)), std::string::npos);
    EXPECT_NE(text.find("CELL_DATA " + std::to_string(nc)), std::string::npos);
    for (const char* name : {"radius", "u_e", "u_hat", "q"})
        EXPECT_NE(text.find(std::string("SCALARS ") + name + " double 1"), std::string::npos) << name;
}

TEST(Output, RunsAreDeterministic) {
    const auto cfg = tiny_single_tube();
    const auto base = std::filesystem::temp_directory_path() / "mdtube_output_test";
    std::filesystem::remove_all(base);
    std::vector<std::string> errors;
    for (int run = 0; run < 2; ++run) {
        const auto dir = base / std::to_string(run);
        const auto written = write_outputs(run_scenario(cfg), dir);
        for (const char* f : {"errors.csv", "transpiration.csv", "segments.csv", "config.ini"})
            EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
        EXPECT_FALSE(std::filesystem::exists(dir / "references.json"));  // only multi-tube runs have one
        EXPECT_TRUE(std::any_of(written.begin(), written.end(), [](const auto& p) { return p.extension() == ".vtk"; }));
        errors.push_back(slurp(dir / "errors.csv"));
        // the written config reproduces the run
        EXPECT_EQ(load_config((dir / "config.ini").string()), cfg);
    }
    EXPECT_EQ(errors[0], errors[1]);
    EXPECT_EQ(lines_of(errors[0]).size(), 1u + 3u);
    std::filesystem::remove_all(base);
}
