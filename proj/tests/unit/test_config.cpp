#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "mdtube/config.hpp"
#include "mdtube/errors.hpp"
#include "mdtube/scenarios.hpp"

using namespace mdtube;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config_string(text, "case.ini");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, MinimalSingleTube) {
    const auto cfg = parse_config_string("[scenario]\nkind = single_tube\n");
    EXPECT_EQ(cfg, default_config(ScenarioKind::SingleTube));
    EXPECT_EQ(cfg.grid.levels, 6);
    EXPECT_DOUBLE_EQ(cfg.geometry.radius, 0.01);
    EXPECT_DOUBLE_EQ(cfg.geometry.rho_factor * cfg.geometry.radius, 0.05);
    // h = 20R on the first level
    EXPECT_DOUBLE_EQ(cfg.grid.extent / cfg.grid.base_cells, 20 * cfg.geometry.radius);
}

TEST(Config, OverridesCommentsAndWhitespace) {
    const auto cfg = parse_config_string(
        "# a comment\n"
        "[scenario]\n"
        "  kind=parallel_tubes   # trailing\n"
        "\n"
        "[law]\n"
        "k = 3\n"
        "[study]\n"
        "k_values = 0.1, 1,3 , 5\n"
        "variant = u_tilde\n"
        "[grid]\n"
        "face_averaging = harmonic\n");
    EXPECT_EQ(cfg.kind, ScenarioKind::ParallelTubes);
    EXPECT_DOUBLE_EQ(cfg.law.k, 3.0);
    EXPECT_EQ(cfg.study.k_values, (std::vector<double>{0.1, 1, 3, 5}));
    EXPECT_EQ(cfg.study.variant, VariantSelection::UTilde);
    EXPECT_EQ(cfg.grid.face_averaging, FaceAveraging::Harmonic);
    // untouched keys keep the kind's defaults
    EXPECT_EQ(cfg.grid.base_cells, 4);
}

TEST(Config, UnknownKeyReportsLine) {
    const auto msg = error_of("[scenario]\nkind = single_tube\n[grid]\nlevles = 3\n");
    EXPECT_NE(msg.find("case.ini:4"), std::string::npos) << msg;
    EXPECT_NE(msg.find("levles"), std::string::npos);
}

TEST(Config, MalformedInputReportsLine) {
    EXPECT_NE(error_of("[scenario]\nkind = single_tube\n[gird]\n").find("case.ini:3"), std::string::npos);
    EXPECT_NE(error_of("[scenario]\nkind = single_tube\nthreads 4\n").find("case.ini:3"), std::string::npos);
    EXPECT_NE(error_of("kind = single_tube\n").find("case.ini:1"), std::string::npos);
    EXPECT_NE(error_of("[scenario]\nkind = single_tube\n[grid]\nlevels = six\n").find("case.ini:4"),
              std::string::npos);
    EXPECT_NE(error_of("[scenario]\nkind = single_tube\n[grid]\nlevels = 3\nlevels = 4\n").find("case.ini:5"),
              std::string::npos);
    EXPECT_NE(error_of("[scenario]\nkind = pipe\n").find("case.ini:2"), std::string::npos);
    EXPECT_NE(error_of("[grid]\nlevels = 3\n").find("missing"), std::string::npos);
}

TEST(Config, ValidationRejectsBadValues) {
    EXPECT_NE(error_of("[scenario]\nkind = single_tube\n[grid]\nlevels = 0\n"), "");
    EXPECT_NE(error_of("[scenario]\nkind = parallel_tubes\n[geometry]\nu_e = 0.1, 0.2\n"), "");
    EXPECT_NE(error_of("[scenario]\nkind = root_soil\n[root_soil]\nnetwork = /no/such/file.net\n"), "");
    EXPECT_NE(error_of("[scenario]\nkind = root_soil\n[root_soil]\ngrids = 20x20\n"), "");
}

TEST(Config, RoundTripsEveryKind) {
    for (auto kind : {ScenarioKind::SingleTube, ScenarioKind::ParallelTubes, ScenarioKind::KernelRadiusStudy,
                      ScenarioKind::DeltaStudy, ScenarioKind::RootSoil}) {
        const auto cfg = default_config(kind);
        const auto text = emit_config_string(cfg);
        EXPECT_EQ(parse_config_string(text), cfg) << text;
        EXPECT_EQ(emit_config_string(parse_config_string(text)), text);
    }
}

TEST(Config, RoundTripsAwkwardValues) {
    auto cfg = default_config(ScenarioKind::RootSoil);
    cfg.name = "dry run";
    cfg.law.alpha = 0.1 + 0.2;  // not exactly representable in short decimal
    cfg.root_soil.soil_pressure = -12345.678901234567;
    cfg.root_soil.collar_pressures = {1e-300, -5e5, 3.0e-7};
    cfg.root_soil.grids = {"20x20x20", "39x39x40"};
    cfg.root_soil.seed = 18446744073709551615ull;
    cfg.solver.linear_solver = LinearSolverKind::BiCGSTAB;
    cfg.output.vtk = false;
    const auto back = parse_config_string(emit_config_string(cfg));
    EXPECT_EQ(back, cfg);
    EXPECT_EQ(back.law.alpha, 0.1 + 0.2);
}

TEST(Config, NetworkPathResolvedAgainstConfigDirectory) {
    const auto dir = std::filesystem::temp_directory_path() / "mdtube_config_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "tiny.net") << "node 1 0 0 0\nnode 2 0 0 -0.05\nseg 1 1 2 0.001 3 1e-12 1e-17\n";
        std::ofstream(dir / "case.ini") << "[scenario]\nkind = root_soil\n[root_soil]\nnetwork = tiny.net\n";
    }
    const auto cfg = load_config((dir / "case.ini").string());
    EXPECT_EQ(std::filesystem::path(cfg.root_soil.network), (dir / "tiny.net").lexically_normal());
    std::filesystem::remove_all(dir);
}

TEST(Config, SoilPressureFromSaturation) {
    const auto cfg = default_config(ScenarioKind::RootSoil);
    EXPECT_TRUE(std::isnan(cfg.root_soil.soil_pressure));
    // frozen: p_ref - p_c(S_e(0.4)) for the loam parameters
    EXPECT_NEAR(root_soil_pressure(cfg), 77665.0, 1.0);
    auto fixed = cfg;
    fixed.root_soil.soil_pressure = -7.8e4;
    EXPECT_EQ(root_soil_pressure(fixed), -7.8e4);
}

TEST(Config, GridSpec) {
    EXPECT_EQ(parse_grid_spec("39x39x40"), (std::array<int, 3>{39, 39, 40}));
    EXPECT_THROW(parse_grid_spec("20x20"), ConfigError);
    EXPECT_THROW(parse_grid_spec("20x0x20"), ConfigError);
    EXPECT_THROW(parse_grid_spec("20x20x20x2"), ConfigError);
}
