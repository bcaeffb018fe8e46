#pragma once

// Scenario configuration: a plain-text key = value file with [sections].
//
//   # comment
//   [scenario]
//   kind = parallel_tubes
//
// Every key has a default, so a config only lists what it changes. Unknown
// sections or keys are errors reported with their line number. emit_config()
// writes every key, and parsing its output gives back an equal config.

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "mdtube/bulk_grid.hpp"
#include "mdtube/coupled_solver.hpp"

namespace mdtube {

enum class ScenarioKind { SingleTube, ParallelTubes, KernelRadiusStudy, DeltaStudy, RootSoil };
enum class LawKind { Constant, Exponential, VanGenuchtenMualem };
enum class VariantSelection { U, UTilde, Both };
enum class DeltaSelection { Off, On, Both };

struct LawConfig {
    LawKind kind = LawKind::Exponential;
    double d0 = 0.5;
    double k = 1.0;
    double d_min = 1e-6;
    // Van Genuchten-Mualem parameters
    double permeability = 5.89912e-13;
    double viscosity = 1e-3;
    double theta_r = 0.08;
    double theta_s = 0.43;
    double alpha = 4.077e-4;
    double n = 1.6;
    double lambda = 0.5;
    double p_ref = 1e5;
    double vgm_d_min = 0.0;  ///< 0 selects 1e-6·K/μ
    /// > 0: bracket T⁻¹ with a lookup table of this many samples
    int table_samples = 0;
    double table_lo = -1e6;
    double table_hi = 1e5;

    bool operator==(const LawConfig&) const = default;
};

struct GeometryConfig {
    // single tube
    double radius = 0.01;
    double u_hat = 0.5;
    double gamma = 1.0;
    // parallel tubes
    double r_max = 0.2;
    /// The anchor û of the largest tube is chosen so that its source equals the
    /// one obtained with r_max_reference and û = u_hat.
    double r_max_reference = 0.2;
    std::vector<double> u_e{0.1};
    double rho_factor = 5.0;

    bool operator==(const GeometryConfig&) const = default;
};

struct GridConfig {
    int levels = 6;
    int base_cells = 5;
    /// Outer radius (single tube) or half-width of the square (parallel tubes).
    double extent = 1.0;
    FaceAveraging face_averaging = FaceAveraging::Kirchhoff;
    int quadrature_order = 3;
    int refinement_levels = 4;
    bool renormalize_clipped = true;

    bool operator==(const GridConfig&) const = default;
};

struct StudyConfig {
    std::vector<double> k_values;       ///< empty: law.k only
    std::vector<double> r_max_values;   ///< empty: geometry.r_max only
    std::vector<double> rho_factors{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    int fixed_cells = 16;               ///< kernel radius study grid
    VariantSelection variant = VariantSelection::Both;
    DeltaSelection delta_correction = DeltaSelection::Off;

    bool operator==(const StudyConfig&) const = default;
};

struct RootSoilConfig {
    std::string network = "synthetic";  ///< network file or "synthetic"
    unsigned long long seed = 8;
    double water_saturation = 0.4;
    /// Far-field soil pressure; NaN derives it from water_saturation.
    double soil_pressure = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> collar_pressures{0.0, -0.5e5, -1e5, -2.5e5, -5e5};
    std::vector<double> domain_lo{-0.04, -0.04, -0.15};
    std::vector<double> domain_hi{0.04, 0.04, 0.0};
    /// Grids as "nx x ny x nz" strings.
    std::vector<std::string> grids{"20x20x20"};
    /// > 0 overrides the rho factor stored with each segment.
    double rho_factor = 3.0;
    bool delta_correction = true;
    double max_cell_length = 1.0;

    bool operator==(const RootSoilConfig& o) const;
};

struct SolverConfig {
    double abs_tol = 0.0;
    double rel_tol = 1e-8;
    int max_iterations = 50;
    int max_halvings = 10;
    LinearSolverKind linear_solver = LinearSolverKind::Auto;

    bool operator==(const SolverConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "mdtube_out";
    bool vtk = true;
    bool history = true;

    bool operator==(const OutputConfig&) const = default;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::SingleTube;
    std::string name = "scenario";
    int threads = 1;
    LawConfig law;
    GeometryConfig geometry;
    GridConfig grid;
    StudyConfig study;
    RootSoilConfig root_soil;
    SolverConfig solver;
    OutputConfig output;

    bool operator==(const ScenarioConfig&) const = default;

    /// Checks ranges and cross-field consistency; throws ConfigError.
    void validate() const;
    DiffusionLaw make_law() const;
    NewtonControls newton_controls() const;
};

/// Parses a config. `source` prefixes error messages ("<source>:<line>: ...").
/// Relative network paths are resolved against `base_directory` when given.
ScenarioConfig parse_config(std::istream& in, const std::string& source = "<config>",
                            const std::string& base_directory = "");
ScenarioConfig parse_config_string(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path);

void emit_config(std::ostream& out, const ScenarioConfig& config);
std::string emit_config_string(const ScenarioConfig& config);

std::string to_string(ScenarioKind kind);
std::string to_string(LawKind kind);
std::string to_string(FaceAveraging averaging);
std::string to_string(LinearSolverKind kind);

/// Defaults for each scenario kind (what a config with only `kind` gives).
ScenarioConfig default_config(ScenarioKind kind);

}  // namespace mdtube
