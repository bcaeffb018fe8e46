#include "mdtube/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "mdtube/errors.hpp"

namespace mdtube {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void log_line(const RunOptions& opt, const std::string& text) {
    if (opt.log) *opt.log << text << std::endl;
}

std::string num(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

std::vector<double> bulk_values(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::array<double, 3> bulk_and_source_errors(const BulkGrid& grid, const DiffusionLaw& law,
                                             const CoupledState& state,
                                             const std::function<double(const Vec3&)>& u_ref,
                                             const std::function<double(const Vec3&)>& psi_ref,
                                             const std::vector<double>& q_exact) {
    const int n = grid.num_cells();
    std::vector<double> un(n), ur(n), pn(n), pr(n);
    for (int c = 0; c < n; ++c) {
        const Vec3 x = grid.center(c);
        un[c] = state.u_b[c];
        ur[c] = u_ref(x);
        pn[c] = law.transform(un[c]);
        pr[c] = psi_ref(x);
    }
    std::vector<double> qn;
    for (const auto& r : state.interface) qn.push_back(r.q);
    return {bulk_l2_error(grid, un, ur, 1.0), bulk_l2_error(grid, pn, pr, 0.1), source_l2_error(qn, q_exact)};
}

FieldExport make_export(const std::string& name, std::shared_ptr<const BulkGrid> grid,
                        std::shared_ptr<const NetworkMesh> mesh, const DiffusionLaw& law,
                        const CoupledState& state) {
    FieldExport f;
    f.name = name;
    f.grid = std::move(grid);
    f.mesh = std::move(mesh);
    f.u = bulk_values(state.u_b);
    f.psi.reserve(f.u.size());
    for (double u : f.u) f.psi.push_back(law.transform(u));
    f.u_e = bulk_values(state.u_e);
    for (const auto& r : state.interface) {
        f.u_hat.push_back(r.u_hat);
        f.q.push_back(r.q);
    }
    f.history = state.history;
    return f;
}

CouplingOptions coupling_options(const ScenarioConfig& cfg, bool delta) {
    CouplingOptions co;
    co.quadrature_order = cfg.grid.quadrature_order;
    co.refinement_levels = cfg.grid.refinement_levels;
    co.renormalize_clipped = cfg.grid.renormalize_clipped;
    co.mean_distance = delta;
    co.threads = cfg.threads;
    return co;
}

std::vector<bool> delta_cases(DeltaSelection d) {
    switch (d) {
        case DeltaSelection::Off: return {false};
        case DeltaSelection::On: return {true};
        case DeltaSelection::Both: return {false, true};
    }
    return {false};
}

std::string case_label(double k, double r_max, double rho_factor, bool delta) {
    return "k=" + num(k) + " r_max=" + num(r_max) + " rho=" + num(rho_factor) + "R" +
           (delta ? " delta" : "");
}

// ---- three parallel tubes in the plane ----

struct PlanarSetup {
    std::vector<TubeSpec> tubes;
    std::shared_ptr<const NetworkMesh> mesh;
    std::vector<double> u_e_cells;
};

PlanarSetup planar_setup(const std::vector<TubeSpec>& tubes) {
    TubeNetwork net;
    for (int i = 0; i < static_cast<int>(tubes.size()); ++i) {
        const auto& t = tubes[i];
        net.add_node(2 * i, {t.x, t.y, 0.0});
        net.add_node(2 * i + 1, {t.x, t.y, 1.0});
        net.add_segment(i, 2 * i, 2 * i + 1, t.radius, t.rho / t.radius, t.gamma, 0.0);
    }
    PlanarSetup s;
    s.tubes = tubes;
    auto mesh = std::make_shared<NetworkMesh>(discretize(net, 10.0));
    for (const auto& c : mesh->cells) s.u_e_cells.push_back(tubes[c.segment].u_e);
    s.mesh = std::move(mesh);
    return s;
}

struct PlanarRun {
    std::array<double, 3> errors{};
    int iterations = 0;
    FieldExport field;
};

PlanarRun solve_planar(const ScenarioConfig& cfg, const DiffusionLaw& law, const PlanarSetup& setup,
                       std::shared_ptr<const MultiTubeSolution> ref, int cells, bool delta, bool keep_field) {
    const double L = cfg.grid.extent;
    auto grid = std::make_shared<BulkGrid>(BulkGrid::planar(-L, -L, L, L, cells, cells));
    for (Side s : {Side::XMin, Side::XMax, Side::YMin, Side::YMax})
        grid->set_boundary(s, BoundaryCondition::dirichlet([ref](const Vec3& p) { return ref->u(p.x, p.y); }));
    const CouplingMap coupling = build_coupling(*grid, *setup.mesh, coupling_options(cfg, delta));

    CoupledOptions co;
    co.averaging = cfg.grid.face_averaging;
    co.prescribed_network = true;
    co.prescribed_u_e = setup.u_e_cells;
    const CoupledSystem sys(*grid, *setup.mesh, coupling, law, co);

    double boundary_mean = 0.0;
    int nb = 0;
    for (const auto& f : grid->faces())
        if (f.dirichlet) {
            boundary_mean += f.dirichlet_value;
            ++nb;
        }
    const CoupledState state = sys.solve(sys.initial_guess(boundary_mean / nb, 0.0), cfg.newton_controls());

    PlanarRun run;
    run.errors = bulk_and_source_errors(
        *grid, law, state, [&](const Vec3& p) { return ref->u(p.x, p.y); },
        [&](const Vec3& p) { return ref->psi(p.x, p.y); }, ref->q);
    run.iterations = state.iterations;
    if (keep_field)
        run.field = make_export("", grid, setup.mesh, law, state);
    return run;
}

struct TubeCase {
    double k;
    double r_max;
    double rho_factor;
    bool delta;
};

// Runs every level of one case against the selected references.
void run_tube_case(const ScenarioConfig& base, const TubeCase& tc, const std::string& study,
                   const std::vector<int>& level_cells, ScenarioResult& result, const RunOptions& opt) {
    ScenarioConfig cfg = base;
    cfg.law.k = tc.k;
    cfg.geometry.r_max = tc.r_max;
    cfg.geometry.rho_factor = tc.rho_factor;
    const DiffusionLaw law = cfg.make_law();
    const double anchor = three_tube_anchor(cfg, law);
    const auto tubes = three_tube_layout(tc.r_max, tc.rho_factor, cfg.geometry.u_e, cfg.geometry.gamma);
    const PlanarSetup setup = planar_setup(tubes);

    std::vector<std::pair<ReferenceVariant, std::shared_ptr<const MultiTubeSolution>>> refs;
    const auto sel = cfg.study.variant;
    if (sel != VariantSelection::UTilde)
        refs.emplace_back(ReferenceVariant::U, std::make_shared<MultiTubeSolution>(
                                                   solve_multi_tube(tubes, law, 0, anchor, ReferenceVariant::U)));
    if (sel != VariantSelection::U)
        refs.emplace_back(ReferenceVariant::UTilde,
                          std::make_shared<MultiTubeSolution>(
                              solve_multi_tube(tubes, law, 0, anchor, ReferenceVariant::UTilde)));
    for (const auto& [v, r] : refs) result.references_json.push_back(r->to_json());

    const std::string label = case_label(tc.k, tc.r_max, tc.rho_factor, tc.delta);
    for (std::size_t l = 0; l < level_cells.size(); ++l) {
        ErrorRow row;
        row.study = study;
        row.k = tc.k;
        row.r_max = tc.r_max;
        row.rho_factor = tc.rho_factor;
        row.delta_correction = tc.delta;
        row.level = static_cast<int>(l);
        row.cells = level_cells[l] * level_cells[l];
        row.h = 2.0 * cfg.grid.extent / level_cells[l];
        const bool finest = l + 1 == level_cells.size();
        for (const auto& [variant, ref] : refs) {
            const auto t0 = Clock::now();
            PlanarRun run = solve_planar(cfg, law, setup, ref, level_cells[l], tc.delta, finest && opt.keep_fields);
            if (variant == ReferenceVariant::U) {
                row.e = run.errors;
                row.iterations = run.iterations;
            } else {
                row.e_tilde = run.errors;
                row.iterations_tilde = run.iterations;
            }
            log_line(opt, "[" + study + "] " + label + " N=" + std::to_string(level_cells[l]) + " " +
                              to_string(variant) + ": E_u=" + num(run.errors[0]) + " E_psi=" +
                              num(run.errors[1]) + " E_q=" + num(run.errors[2]) + " (" +
                              std::to_string(run.iterations) + " it, " + num(seconds_since(t0), 3) + " s)");
            if (finest && opt.keep_fields) {
                std::string name = study + "_k" + num(tc.k) + "_R" + num(tc.r_max) + "_rho" + num(tc.rho_factor) +
                                   (tc.delta ? "_delta" : "") + "_" + to_string(variant) + "_N" +
                                   std::to_string(level_cells[l]);
                run.field.name = name;
                result.fields.push_back(std::move(run.field));
            }
        }
        result.errors.rows.push_back(row);
    }
}

std::vector<int> level_sequence(const ScenarioConfig& cfg) {
    std::vector<int> cells;
    for (int l = 0; l < cfg.grid.levels; ++l) cells.push_back(cfg.grid.base_cells << l);
    return cells;
}

std::vector<double> or_default(const std::vector<double>& v, double fallback) {
    return v.empty() ? std::vector<double>{fallback} : v;
}

}  // namespace

std::vector<ErrorRow> ErrorReport::select(double k, double r_max, double rho_factor, bool delta) const {
    auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
    std::vector<ErrorRow> out;
    for (const auto& r : rows)
        if (same(r.k, k) && same(r.r_max, r_max) && same(r.rho_factor, rho_factor) && r.delta_correction == delta)
            out.push_back(r);
    std::sort(out.begin(), out.end(), [](const ErrorRow& a, const ErrorRow& b) { return a.level < b.level; });
    return out;
}

void compute_orders(ErrorReport& report) {
    auto order = [](double coarse, double fine) {
        if (!(coarse > 0.0) || !(fine > 0.0)) return kNaN;
        return std::log2(coarse / fine);
    };
    auto same_case = [](const ErrorRow& a, const ErrorRow& b) {
        auto same = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
        return a.study == b.study && same(a.k, b.k) && same(a.r_max, b.r_max) &&
               same(a.rho_factor, b.rho_factor) && a.delta_correction == b.delta_correction;
    };
    for (auto& row : report.rows) {
        row.order.fill(kNaN);
        row.order_tilde.fill(kNaN);
        for (const auto& prev : report.rows) {
            if (!same_case(prev, row) || prev.level != row.level - 1) continue;
            for (int i = 0; i < 3; ++i) {
                row.order[i] = order(prev.e[i], row.e[i]);
                row.order_tilde[i] = order(prev.e_tilde[i], row.e_tilde[i]);
            }
        }
    }
}

std::vector<TubeSpec> three_tube_layout(double r_max, double rho_factor, const std::vector<double>& u_e,
                                        double gamma) {
    if (u_e.size() != 3) throw ConfigError("three tubes need three u_e values");
    const double scale[3] = {1.0, 0.75, 0.5};
    const double xs[3] = {-0.5, 0.5, 0.0};
    const double ys[3] = {-0.5, -0.5, 0.5};
    std::vector<TubeSpec> tubes;
    for (int i = 0; i < 3; ++i) {
        const double r = scale[i] * r_max;
        tubes.push_back({xs[i], ys[i], r, rho_factor * r, gamma, u_e[i]});
    }
    return tubes;
}

double three_tube_anchor(const ScenarioConfig& cfg, const DiffusionLaw& law) {
    const auto& g = cfg.geometry;
    if (g.r_max == g.r_max_reference) return g.u_hat;
    const auto ref_tubes = three_tube_layout(g.r_max_reference, g.rho_factor, g.u_e, g.gamma);
    const auto ref = solve_multi_tube(ref_tubes, law, 0, g.u_hat, ReferenceVariant::U);
    const auto tubes = three_tube_layout(g.r_max, g.rho_factor, g.u_e, g.gamma);
    return anchor_for_source(tubes[0], ref.q[0]);
}

namespace {

void run_single_tube_case(const ScenarioConfig& cfg, ScenarioResult& result, const RunOptions& opt) {
    const DiffusionLaw law = cfg.make_law();
    const auto& g = cfg.geometry;
    SingleTubeParams p;
    p.radius = g.radius;
    p.rho = g.rho_factor * g.radius;
    p.u_hat = g.u_hat;
    p.u_e = g.u_e.front();
    p.gamma = g.gamma;
    const SingleTubeSolution sol(p, law);

    TubeNetwork net;
    net.add_node(0, {0.0, 0.0, 0.0});
    net.add_node(1, {0.0, 0.0, 1.0});
    net.add_segment(0, 0, 1, p.radius, g.rho_factor, p.gamma, 0.0);
    auto mesh = std::make_shared<NetworkMesh>(discretize(net, 10.0));
    const double k = cfg.law.kind == LawKind::Constant ? 0.0 : cfg.law.k;

    for (bool delta : delta_cases(cfg.study.delta_correction)) {
        const auto levels = level_sequence(cfg);
        for (std::size_t l = 0; l < levels.size(); ++l) {
            const auto t0 = Clock::now();
            auto grid = std::make_shared<BulkGrid>(BulkGrid::radial(cfg.grid.extent, levels[l]));
            grid->set_boundary(Side::XMax, BoundaryCondition::dirichlet(sol.u(cfg.grid.extent)));
            const CouplingMap coupling = build_coupling(*grid, *mesh, coupling_options(cfg, delta));
            CoupledOptions co;
            co.averaging = cfg.grid.face_averaging;
            co.prescribed_network = true;
            co.prescribed_u_e = {p.u_e};
            const CoupledSystem sys(*grid, *mesh, coupling, law, co);
            const CoupledState state =
                sys.solve(sys.initial_guess(sol.u(cfg.grid.extent), p.u_e), cfg.newton_controls());

            ErrorRow row;
            row.study = "single_tube";
            row.k = k;
            row.r_max = p.radius;
            row.rho_factor = g.rho_factor;
            row.delta_correction = delta;
            row.level = static_cast<int>(l);
            row.cells = levels[l];
            row.h = grid->h();
            row.e = bulk_and_source_errors(
                *grid, law, state, [&](const Vec3& x) { return sol.u(x.x); },
                [&](const Vec3& x) { return sol.psi(x.x); }, {sol.q()});
            row.iterations = state.iterations;
            result.errors.rows.push_back(row);
            log_line(opt, "[single_tube] k=" + num(k) + " N=" + std::to_string(levels[l]) + " h=" + num(row.h) +
                              (delta ? " delta" : "") + ": E_u=" + num(row.e[0]) + " E_psi=" + num(row.e[1]) +
                              " E_q=" + num(row.e[2]) + " (" + std::to_string(state.iterations) + " it, " +
                              num(seconds_since(t0), 3) + " s)");
            if (opt.keep_fields && l + 1 == levels.size())
                result.fields.push_back(make_export("single_tube_k" + num(k) + "_N" + std::to_string(levels[l]) +
                                                        (delta ? "_delta" : ""),
                                                    grid, mesh, law, state));
        }
    }
}

}  // namespace

ScenarioResult run_single_tube(const ScenarioConfig& cfg, const RunOptions& opt) {
    cfg.validate();
    ScenarioResult result;
    result.config = cfg;
    if (cfg.law.kind == LawKind::Constant) {
        run_single_tube_case(cfg, result, opt);
    } else {
        for (double k : or_default(cfg.study.k_values, cfg.law.k)) {
            ScenarioConfig c = cfg;
            c.law.k = k;
            run_single_tube_case(c, result, opt);
        }
    }
    compute_orders(result.errors);
    return result;
}

ScenarioResult run_parallel_tubes(const ScenarioConfig& cfg, const RunOptions& opt) {
    cfg.validate();
    ScenarioResult result;
    result.config = cfg;
    const auto levels = level_sequence(cfg);
    const std::string study = to_string(cfg.kind);
    for (double k : or_default(cfg.study.k_values, cfg.law.k))
        for (double r : or_default(cfg.study.r_max_values, cfg.geometry.r_max))
            for (bool delta : delta_cases(cfg.study.delta_correction))
                run_tube_case(cfg, {k, r, cfg.geometry.rho_factor, delta}, study, levels, result, opt);
    compute_orders(result.errors);
    return result;
}

ScenarioResult run_delta_study(const ScenarioConfig& cfg, const RunOptions& opt) {
    ScenarioConfig c = cfg;
    c.study.delta_correction = DeltaSelection::Both;
    ScenarioResult result = run_parallel_tubes(c, opt);
    result.config = cfg;
    return result;
}

ScenarioResult run_kernel_radius_study(const ScenarioConfig& cfg, const RunOptions& opt) {
    cfg.validate();
    ScenarioResult result;
    result.config = cfg;
    for (double k : or_default(cfg.study.k_values, cfg.law.k))
        for (double r : or_default(cfg.study.r_max_values, cfg.geometry.r_max))
            for (double f : cfg.study.rho_factors)
                for (bool delta : delta_cases(cfg.study.delta_correction))
                    run_tube_case(cfg, {k, r, f, delta}, "kernel_radius_study", {cfg.study.fixed_cells}, result,
                                  opt);
    compute_orders(result.errors);
    return result;
}

double root_soil_pressure(const ScenarioConfig& cfg) {
    if (!std::isnan(cfg.root_soil.soil_pressure)) return cfg.root_soil.soil_pressure;
    VanGenuchtenMualemLaw p;
    p.theta_r = cfg.law.theta_r;
    p.theta_s = cfg.law.theta_s;
    p.alpha = cfg.law.alpha;
    p.n = cfg.law.n;
    p.p_ref = cfg.law.p_ref;
    const double se = p.effective_from_water_saturation(cfg.root_soil.water_saturation);
    return p.p_ref - p.capillary_pressure(se);
}

std::array<int, 3> parse_grid_spec(const std::string& spec) {
    std::array<int, 3> n{};
    std::string s = spec;
    std::replace(s.begin(), s.end(), 'x', ' ');
    std::replace(s.begin(), s.end(), 'X', ' ');
    std::istringstream in(s);
    for (int& v : n)
        if (!(in >> v) || v < 1) throw ConfigError("malformed grid '" + spec + "', expected e.g. 20x20x20");
    std::string rest;
    if (in >> rest) throw ConfigError("malformed grid '" + spec + "', expected e.g. 20x20x20");
    return n;
}

std::vector<double> arc_length_from(const NetworkMesh& mesh, int root) {
    std::vector<double> node_s(mesh.num_nodes(), kNaN);
    std::vector<int> stack{root};
    node_s[root] = 0.0;
    while (!stack.empty()) {
        const int nd = stack.back();
        stack.pop_back();
        for (int c : mesh.node_cells[nd]) {
            const auto& cell = mesh.cells[c];
            const int other = cell.node_a == nd ? cell.node_b : cell.node_a;
            if (!std::isnan(node_s[other])) continue;
            node_s[other] = node_s[nd] + cell.length();
            stack.push_back(other);
        }
    }
    std::vector<double> s(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& cell = mesh.cells[c];
        s[c] = std::min(node_s[cell.node_a], node_s[cell.node_b]) + 0.5 * cell.length();
    }
    return s;
}

ScenarioResult run_root_soil(const ScenarioConfig& cfg, const RunOptions& opt) {
    cfg.validate();
    ScenarioResult result;
    result.config = cfg;
    const auto& rs = cfg.root_soil;
    const DiffusionLaw law = cfg.make_law();
    const double ps = root_soil_pressure(cfg);
    result.soil_pressure = ps;
    log_line(opt, "[root_soil] far-field soil pressure " + num(ps, 8) + " Pa");

    TubeNetwork net;
    if (rs.network == "synthetic") {
        RootGeneratorOptions ro;
        ro.seed = rs.seed;
        if (rs.rho_factor > 0.0) ro.rho_factor = rs.rho_factor;
        ro.collar = {0.5 * (rs.domain_lo[0] + rs.domain_hi[0]), 0.5 * (rs.domain_lo[1] + rs.domain_hi[1]),
                     rs.domain_hi[2]};
        net = synthetic_root_system(ro);
    } else {
        net = TubeNetwork::load(rs.network);
    }
    if (rs.rho_factor > 0.0)
        for (auto& s : net.segments()) s.rho = rs.rho_factor * s.radius;
    const int collar = net.top_node();
    auto mesh = std::make_shared<NetworkMesh>(discretize(net, rs.max_cell_length));
    const int collar_mesh_node = mesh->original_node[collar];
    const std::vector<double> s_coord = arc_length_from(*mesh, collar_mesh_node);
    const double z_collar = mesh->nodes[collar_mesh_node].z;
    log_line(opt, "[root_soil] network: " + std::to_string(net.segments().size()) + " segments, " +
                      std::to_string(mesh->num_cells()) + " segment cells, length " + num(net.total_length()) +
                      " m");

    const Vec3 lo{rs.domain_lo[0], rs.domain_lo[1], rs.domain_lo[2]};
    const Vec3 hi{rs.domain_hi[0], rs.domain_hi[1], rs.domain_hi[2]};
    for (const auto& spec : rs.grids) {
        const auto n = parse_grid_spec(spec);
        auto grid = std::make_shared<BulkGrid>(BulkGrid::cartesian(lo, hi, n[0], n[1], n[2]));
        for (Side s : {Side::XMin, Side::XMax, Side::YMin, Side::YMax, Side::ZMin})
            grid->set_boundary(s, BoundaryCondition::dirichlet(ps));
        grid->set_boundary(Side::ZMax, BoundaryCondition::neumann());
        auto t0 = Clock::now();
        const CouplingMap coupling = build_coupling(*grid, *mesh, coupling_options(cfg, rs.delta_correction));
        log_line(opt, "[root_soil] grid " + spec + " (" + std::to_string(grid->num_cells()) +
                          " cells): coupling built in " + num(seconds_since(t0), 3) + " s, " +
                          std::to_string(coupling.num_clipped()) + " clipped kernels");

        Eigen::VectorXd x;
        for (double prc : rs.collar_pressures) {
            t0 = Clock::now();
            mesh->node_bc[collar_mesh_node] = {true, prc};
            CoupledOptions co;
            co.averaging = cfg.grid.face_averaging;
            const CoupledSystem sys(*grid, *mesh, coupling, law, co);
            // continue from the previous collar pressure
            if (x.size() != sys.num_unknowns()) x = sys.initial_guess(ps, ps);
            CoupledState state;
            try {
                state = sys.solve(x, cfg.newton_controls());
            } catch (const ConvergenceError& e) {
                throw ConvergenceError("root_soil grid " + spec + ", collar pressure " + num(prc, 8) + ": " + e.what(),
                                       e.history());
            }
            x = sys.pack(state.u_b, state.u_e);

            TranspirationRow row;
            row.collar_pressure = prc;
            row.grid = spec;
            row.cells = grid->num_cells();
            row.r_t = sys.total_source(state);
            row.collar_flux = sys.network_boundary_inflow(state);
            row.relative_mismatch = std::abs(row.r_t - row.collar_flux) / std::max(std::abs(row.r_t), 1e-300);
            row.iterations = state.iterations;
            for (const auto& h : state.history)
                if (h.iteration > 0 && h.damping < 1.0) ++row.damped_steps;
            row.min_interface_pressure = std::numeric_limits<double>::infinity();
            for (int i = 0; i < mesh->num_cells(); ++i) {
                const double uh = state.interface[i].u_hat;
                const double pr = state.u_e[i];
                row.min_interface_pressure = std::min(row.min_interface_pressure, uh);
                if (!(uh > std::min(pr, ps) && uh < std::max(pr, ps))) ++row.interface_violations;
                SegmentRow seg;
                seg.collar_pressure = prc;
                seg.grid = spec;
                seg.cell = i;
                seg.segment = net.segments()[mesh->cells[i].segment].id;
                seg.s = s_coord[i];
                seg.depth = z_collar - mesh->cells[i].line.midpoint().z;
                seg.radius = mesh->cells[i].radius;
                seg.u_e = pr;
                seg.u_hat = uh;
                seg.q = state.interface[i].q;
                result.segments.push_back(seg);
            }
            result.transpiration.push_back(row);
            log_line(opt, "[root_soil] grid " + spec + " p_rc=" + num(prc, 6) + ": r_T=" + num(row.r_t, 8) +
                              " collar flux=" + num(row.collar_flux, 8) + " (" + std::to_string(row.iterations) +
                              " it, " + std::to_string(row.damped_steps) + " damped, " +
                              num(seconds_since(t0), 3) + " s)");
            if (opt.keep_fields) {
                std::ostringstream name;
                name << "root_soil_" << spec << "_p" << prc;
                result.fields.push_back(make_export(name.str(), grid, mesh, law, state));
            }
        }
    }
    return result;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt) {
    switch (cfg.kind) {
        case ScenarioKind::SingleTube: return run_single_tube(cfg, opt);
        case ScenarioKind::ParallelTubes: return run_parallel_tubes(cfg, opt);
        case ScenarioKind::KernelRadiusStudy: return run_kernel_radius_study(cfg, opt);
        case ScenarioKind::DeltaStudy: return run_delta_study(cfg, opt);
        case ScenarioKind::RootSoil: return run_root_soil(cfg, opt);
    }
    throw ConfigError("unknown scenario kind");
}

}  // namespace mdtube
