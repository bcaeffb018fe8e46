#pragma once

// Scenario drivers: convergence studies against the reference solutions and
// the root-soil application.

#include <array>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "mdtube/analytic_reference.hpp"
#include "mdtube/config.hpp"
#include "mdtube/coupled_solver.hpp"
#include "mdtube/network.hpp"

namespace mdtube {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One refinement level of one study case. `e` holds (E_u, E_psi, E_q) of the
/// run against U, `e_tilde` the run against U_tilde; NaN when not computed.
struct ErrorRow {
    std::string study;
    double k = kNaN;
    double r_max = kNaN;
    double rho_factor = kNaN;
    bool delta_correction = false;
    int level = 0;
    int cells = 0;
    double h = 0.0;
    std::array<double, 3> e{kNaN, kNaN, kNaN};
    std::array<double, 3> e_tilde{kNaN, kNaN, kNaN};
    std::array<double, 3> order{kNaN, kNaN, kNaN};
    std::array<double, 3> order_tilde{kNaN, kNaN, kNaN};
    int iterations = 0;
    int iterations_tilde = 0;
};

struct ErrorReport {
    std::vector<ErrorRow> rows;

    /// Rows of one case (same study, k, r_max, rho_factor, delta), by level.
    std::vector<ErrorRow> select(double k, double r_max, double rho_factor, bool delta) const;
};

/// Observed orders log2(E_{l-1}/E_l) between consecutive levels of each case.
void compute_orders(ErrorReport& report);

struct TranspirationRow {
    double collar_pressure = 0.0;
    std::string grid;
    int cells = 0;
    double r_t = 0.0;          ///< Σ q L over segment cells
    double collar_flux = 0.0;  ///< inflow through the Dirichlet collar node
    double relative_mismatch = 0.0;
    int iterations = 0;
    int damped_steps = 0;      ///< Newton steps with line-search damping
    double min_interface_pressure = 0.0;
    int interface_violations = 0;  ///< segment cells with û outside (p_r, p_s)
};

struct SegmentRow {
    double collar_pressure = 0.0;
    std::string grid;
    int cell = 0;
    int segment = 0;
    double s = 0.0;      ///< arc length from the collar to the cell midpoint
    double depth = 0.0;  ///< below the collar
    double radius = 0.0;
    double u_e = 0.0;
    double u_hat = 0.0;
    double q = 0.0;
};

/// Snapshot of a solved state for VTK export.
struct FieldExport {
    std::string name;
    std::shared_ptr<const BulkGrid> grid;
    std::vector<double> u;
    std::vector<double> psi;
    std::shared_ptr<const NetworkMesh> mesh;
    std::vector<double> u_e;
    std::vector<double> u_hat;
    std::vector<double> q;
    std::vector<NewtonRecord> history;
};

struct ScenarioResult {
    ScenarioConfig config;
    ErrorReport errors;
    std::vector<TranspirationRow> transpiration;
    std::vector<SegmentRow> segments;
    std::vector<FieldExport> fields;
    double soil_pressure = kNaN;
    std::vector<std::string> references_json;
};

struct RunOptions {
    std::ostream* log = nullptr;
    /// Keep solved fields for export (finest level of each case / every root-soil run).
    bool keep_fields = true;
};

ScenarioResult run_single_tube(const ScenarioConfig& config, const RunOptions& options = {});
/// k sweep and radius sweep share this driver (study.k_values, study.r_max_values).
ScenarioResult run_parallel_tubes(const ScenarioConfig& config, const RunOptions& options = {});
ScenarioResult run_kernel_radius_study(const ScenarioConfig& config, const RunOptions& options = {});
/// Parallel-tube sweep with and without the mean-distance correction.
ScenarioResult run_delta_study(const ScenarioConfig& config, const RunOptions& options = {});
ScenarioResult run_root_soil(const ScenarioConfig& config, const RunOptions& options = {});
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// The three-tube layout in [-1,1]²: radii (1, 0.75, 0.5)·r_max at
/// (-0.5,-0.5), (0.5,-0.5), (0,0.5).
std::vector<TubeSpec> three_tube_layout(double r_max, double rho_factor, const std::vector<double>& u_e,
                                        double gamma = 1.0);

/// Anchor û of the largest tube: u_hat at r_max_reference, otherwise the value
/// that reproduces the reference-radius source of the largest tube.
double three_tube_anchor(const ScenarioConfig& config, const DiffusionLaw& law);

/// Far-field soil pressure p_ref − p_c(S_e(S_w)) or the configured value.
double root_soil_pressure(const ScenarioConfig& config);

/// "20x20x20" -> {20, 20, 20}.
std::array<int, 3> parse_grid_spec(const std::string& spec);

/// Arc length from `root` (mesh node) to each segment-cell midpoint.
std::vector<double> arc_length_from(const NetworkMesh& mesh, int root);

}  // namespace mdtube
