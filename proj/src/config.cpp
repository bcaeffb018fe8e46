#include "mdtube/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "mdtube/errors.hpp"
#include "mdtube/scenarios.hpp"

namespace mdtube {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double parse_double(const std::string& v) {
    const std::string t = lower(v);
    if (t == "nan" || t == "auto") return std::numeric_limits<double>::quiet_NaN();
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("expected a number, got '" + v + "'");
    return out;
}

template <class T>
T parse_integer(const std::string& v) {
    T out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("expected an integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v) {
    const std::string t = lower(v);
    if (t == "true" || t == "on" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "off" || t == "no" || t == "0") return false;
    throw ConfigError("expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty list entry in '" + v + "'");
        out.push_back(item);
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(parse_double(s));
    return out;
}

// Shortest representation that reads back to the same double.
std::string fmt(double v) {
    if (std::isnan(v)) return "auto";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string fmt(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
    return out;
}

std::string fmt(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
    return out;
}

std::string fmt(bool b) { return b ? "true" : "false"; }

template <class E>
E parse_enum(const std::string& v, std::initializer_list<std::pair<const char*, E>> names) {
    const std::string t = lower(v);
    std::string allowed;
    for (const auto& [n, e] : names) {
        if (t == n) return e;
        allowed += (allowed.empty() ? "" : "|") + std::string(n);
    }
    throw ConfigError("expected one of " + allowed + ", got '" + v + "'");
}

ScenarioKind parse_kind(const std::string& v) {
    return parse_enum<ScenarioKind>(v, {{"single_tube", ScenarioKind::SingleTube},
                                        {"parallel_tubes", ScenarioKind::ParallelTubes},
                                        {"kernel_radius_study", ScenarioKind::KernelRadiusStudy},
                                        {"delta_study", ScenarioKind::DeltaStudy},
                                        {"root_soil", ScenarioKind::RootSoil}});
}

std::string to_string(VariantSelection v) {
    return v == VariantSelection::U ? "U" : v == VariantSelection::UTilde ? "U_tilde" : "both";
}

std::string to_string(DeltaSelection d) {
    return d == DeltaSelection::Off ? "off" : d == DeltaSelection::On ? "on" : "both";
}

struct Field {
    const char* section;
    const char* key;
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

#define MDTUBE_DOUBLE(sec, name, member)                                                    \
    Field {                                                                                 \
        sec, name, [](ScenarioConfig& c, const std::string& v) { c.member = parse_double(v); }, \
            [](const ScenarioConfig& c) { return fmt(c.member); }                           \
    }
#define MDTUBE_INT(sec, name, member)                                                                 \
    Field {                                                                                           \
        sec, name,                                                                                    \
            [](ScenarioConfig& c, const std::string& v) {                                             \
                c.member = parse_integer<decltype(c.member)>(v);                           \
            },                                                                                        \
            [](const ScenarioConfig& c) { return std::to_string(c.member); }                          \
    }
#define MDTUBE_BOOL(sec, name, member)                                                    \
    Field {                                                                               \
        sec, name, [](ScenarioConfig& c, const std::string& v) { c.member = parse_bool(v); }, \
            [](const ScenarioConfig& c) { return fmt(c.member); }                         \
    }
#define MDTUBE_DOUBLES(sec, name, member)                                                    \
    Field {                                                                                  \
        sec, name, [](ScenarioConfig& c, const std::string& v) { c.member = parse_doubles(v); }, \
            [](const ScenarioConfig& c) { return fmt(c.member); }                            \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> all = {
        {"scenario", "kind", [](ScenarioConfig& c, const std::string& v) { c.kind = parse_kind(v); },
         [](const ScenarioConfig& c) { return to_string(c.kind); }},
        {"scenario", "name",
         [](ScenarioConfig& c, const std::string& v) {
             if (v.empty()) throw ConfigError("name must not be empty");
             c.name = v;
         },
         [](const ScenarioConfig& c) { return c.name; }},
        MDTUBE_INT("scenario", "threads", threads),

        {"law", "type",
         [](ScenarioConfig& c, const std::string& v) {
             c.law.kind = parse_enum<LawKind>(v, {{"constant", LawKind::Constant},
                                                  {"exponential", LawKind::Exponential},
                                                  {"van_genuchten_mualem", LawKind::VanGenuchtenMualem}});
         },
         [](const ScenarioConfig& c) { return to_string(c.law.kind); }},
        MDTUBE_DOUBLE("law", "d0", law.d0),
        MDTUBE_DOUBLE("law", "k", law.k),
        MDTUBE_DOUBLE("law", "d_min", law.d_min),
        MDTUBE_DOUBLE("law", "permeability", law.permeability),
        MDTUBE_DOUBLE("law", "viscosity", law.viscosity),
        MDTUBE_DOUBLE("law", "theta_r", law.theta_r),
        MDTUBE_DOUBLE("law", "theta_s", law.theta_s),
        MDTUBE_DOUBLE("law", "alpha", law.alpha),
        MDTUBE_DOUBLE("law", "n", law.n),
        MDTUBE_DOUBLE("law", "lambda", law.lambda),
        MDTUBE_DOUBLE("law", "p_ref", law.p_ref),
        MDTUBE_DOUBLE("law", "vgm_d_min", law.vgm_d_min),
        MDTUBE_INT("law", "table_samples", law.table_samples),
        MDTUBE_DOUBLE("law", "table_lo", law.table_lo),
        MDTUBE_DOUBLE("law", "table_hi", law.table_hi),

        MDTUBE_DOUBLE("geometry", "radius", geometry.radius),
        MDTUBE_DOUBLE("geometry", "u_hat", geometry.u_hat),
        MDTUBE_DOUBLE("geometry", "gamma", geometry.gamma),
        MDTUBE_DOUBLE("geometry", "r_max", geometry.r_max),
        MDTUBE_DOUBLE("geometry", "r_max_reference", geometry.r_max_reference),
        MDTUBE_DOUBLES("geometry", "u_e", geometry.u_e),
        MDTUBE_DOUBLE("geometry", "rho_factor", geometry.rho_factor),

        MDTUBE_INT("grid", "levels", grid.levels),
        MDTUBE_INT("grid", "base_cells", grid.base_cells),
        MDTUBE_DOUBLE("grid", "extent", grid.extent),
        {"grid", "face_averaging",
         [](ScenarioConfig& c, const std::string& v) {
             c.grid.face_averaging = parse_enum<FaceAveraging>(
                 v, {{"harmonic", FaceAveraging::Harmonic}, {"kirchhoff", FaceAveraging::Kirchhoff}});
         },
         [](const ScenarioConfig& c) { return to_string(c.grid.face_averaging); }},
        MDTUBE_INT("grid", "quadrature_order", grid.quadrature_order),
        MDTUBE_INT("grid", "refinement_levels", grid.refinement_levels),
        MDTUBE_BOOL("grid", "renormalize_clipped", grid.renormalize_clipped),

        MDTUBE_DOUBLES("study", "k_values", study.k_values),
        MDTUBE_DOUBLES("study", "r_max_values", study.r_max_values),
        MDTUBE_DOUBLES("study", "rho_factors", study.rho_factors),
        MDTUBE_INT("study", "fixed_cells", study.fixed_cells),
        {"study", "variant",
         [](ScenarioConfig& c, const std::string& v) {
             c.study.variant = parse_enum<VariantSelection>(
                 v, {{"u", VariantSelection::U}, {"u_tilde", VariantSelection::UTilde}, {"both", VariantSelection::Both}});
         },
         [](const ScenarioConfig& c) { return to_string(c.study.variant); }},
        {"study", "delta_correction",
         [](ScenarioConfig& c, const std::string& v) {
             c.study.delta_correction = parse_enum<DeltaSelection>(
                 v, {{"off", DeltaSelection::Off}, {"on", DeltaSelection::On}, {"both", DeltaSelection::Both}});
         },
         [](const ScenarioConfig& c) { return to_string(c.study.delta_correction); }},

        {"root_soil", "network",
         [](ScenarioConfig& c, const std::string& v) {
             if (v.empty()) throw ConfigError("network must not be empty");
             c.root_soil.network = v;
         },
         [](const ScenarioConfig& c) { return c.root_soil.network; }},
        MDTUBE_INT("root_soil", "seed", root_soil.seed),
        MDTUBE_DOUBLE("root_soil", "water_saturation", root_soil.water_saturation),
        MDTUBE_DOUBLE("root_soil", "soil_pressure", root_soil.soil_pressure),
        MDTUBE_DOUBLES("root_soil", "collar_pressures", root_soil.collar_pressures),
        MDTUBE_DOUBLES("root_soil", "domain_lo", root_soil.domain_lo),
        MDTUBE_DOUBLES("root_soil", "domain_hi", root_soil.domain_hi),
        {"root_soil", "grids",
         [](ScenarioConfig& c, const std::string& v) { c.root_soil.grids = split_list(v); },
         [](const ScenarioConfig& c) { return fmt(c.root_soil.grids); }},
        MDTUBE_DOUBLE("root_soil", "rho_factor", root_soil.rho_factor),
        MDTUBE_BOOL("root_soil", "delta_correction", root_soil.delta_correction),
        MDTUBE_DOUBLE("root_soil", "max_cell_length", root_soil.max_cell_length),

        MDTUBE_DOUBLE("solver", "abs_tol", solver.abs_tol),
        MDTUBE_DOUBLE("solver", "rel_tol", solver.rel_tol),
        MDTUBE_INT("solver", "max_iterations", solver.max_iterations),
        MDTUBE_INT("solver", "max_halvings", solver.max_halvings),
        {"solver", "linear_solver",
         [](ScenarioConfig& c, const std::string& v) {
             c.solver.linear_solver = parse_enum<LinearSolverKind>(v, {{"auto", LinearSolverKind::Auto},
                                                                       {"sparselu", LinearSolverKind::SparseLU},
                                                                       {"bicgstab", LinearSolverKind::BiCGSTAB}});
         },
         [](const ScenarioConfig& c) { return to_string(c.solver.linear_solver); }},

        {"output", "directory",
         [](ScenarioConfig& c, const std::string& v) {
             if (v.empty()) throw ConfigError("output directory must not be empty");
             c.output.directory = v;
         },
         [](const ScenarioConfig& c) { return c.output.directory; }},
        MDTUBE_BOOL("output", "vtk", output.vtk),
        MDTUBE_BOOL("output", "history", output.history),
    };
    return all;
}

#undef MDTUBE_DOUBLE
#undef MDTUBE_INT
#undef MDTUBE_BOOL
#undef MDTUBE_DOUBLES

const Field* find_field(const std::string& section, const std::string& key) {
    for (const auto& f : fields())
        if (section == f.section && key == f.key) return &f;
    return nullptr;
}

bool known_section(const std::string& section) {
    for (const auto& f : fields())
        if (section == f.section) return true;
    return false;
}

struct Entry {
    int line;
    std::string section, key, value;
};

}  // namespace

bool RootSoilConfig::operator==(const RootSoilConfig& o) const {
    const bool same_pressure = (std::isnan(soil_pressure) && std::isnan(o.soil_pressure)) ||
                               soil_pressure == o.soil_pressure;
    return network == o.network && seed == o.seed && water_saturation == o.water_saturation &&
           same_pressure && collar_pressures == o.collar_pressures && domain_lo == o.domain_lo &&
           domain_hi == o.domain_hi && grids == o.grids && rho_factor == o.rho_factor &&
           delta_correction == o.delta_correction && max_cell_length == o.max_cell_length;
}

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::SingleTube: return "single_tube";
        case ScenarioKind::ParallelTubes: return "parallel_tubes";
        case ScenarioKind::KernelRadiusStudy: return "kernel_radius_study";
        case ScenarioKind::DeltaStudy: return "delta_study";
        case ScenarioKind::RootSoil: return "root_soil";
    }
    return "?";
}

std::string to_string(LawKind kind) {
    switch (kind) {
        case LawKind::Constant: return "constant";
        case LawKind::Exponential: return "exponential";
        case LawKind::VanGenuchtenMualem: return "van_genuchten_mualem";
    }
    return "?";
}

std::string to_string(FaceAveraging averaging) {
    return averaging == FaceAveraging::Harmonic ? "harmonic" : "kirchhoff";
}

std::string to_string(LinearSolverKind kind) {
    switch (kind) {
        case LinearSolverKind::Auto: return "auto";
        case LinearSolverKind::SparseLU: return "sparselu";
        case LinearSolverKind::BiCGSTAB: return "bicgstab";
    }
    return "?";
}

ScenarioConfig default_config(ScenarioKind kind) {
    ScenarioConfig c;
    c.kind = kind;
    c.name = to_string(kind);
    switch (kind) {
        case ScenarioKind::SingleTube:
            break;
        case ScenarioKind::ParallelTubes:
        case ScenarioKind::DeltaStudy:
            c.geometry.r_max = 0.2;
            c.geometry.rho_factor = 2.0;
            c.geometry.u_hat = 0.8;
            c.geometry.u_e = {0.3, 0.2, 0.1};
            c.grid.base_cells = 4;
            c.grid.levels = 7;
            if (kind == ScenarioKind::DeltaStudy) {
                c.grid.levels = 5;
                c.study.k_values = {0.1, 1.0, 3.0, 5.0};
                c.study.variant = VariantSelection::U;
                c.study.delta_correction = DeltaSelection::Both;
            }
            break;
        case ScenarioKind::KernelRadiusStudy:
            c.geometry.r_max = 0.05;
            c.geometry.u_hat = 0.8;
            c.geometry.u_e = {0.3, 0.2, 0.1};
            c.grid.base_cells = 4;
            c.study.variant = VariantSelection::U;
            break;
        case ScenarioKind::RootSoil:
            c.law.kind = LawKind::VanGenuchtenMualem;
            break;
    }
    return c;
}

void ScenarioConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(threads >= 1, "threads must be >= 1");
    require(grid.levels >= 1, "grid.levels must be >= 1");
    require(grid.base_cells >= 1, "grid.base_cells must be >= 1");
    require(grid.extent > 0.0, "grid.extent must be positive");
    require(grid.quadrature_order >= 1 && grid.quadrature_order <= 8, "grid.quadrature_order must be in 1..8");
    require(grid.refinement_levels >= 0 && grid.refinement_levels <= 8, "grid.refinement_levels must be in 0..8");
    require(solver.max_iterations >= 1, "solver.max_iterations must be >= 1");
    require(solver.max_halvings >= 0, "solver.max_halvings must be >= 0");
    require(solver.rel_tol > 0.0 && solver.abs_tol >= 0.0, "solver tolerances must be positive");
    for (double k : study.k_values) require(std::isfinite(k), "study.k_values must be finite");

    switch (kind) {
        case ScenarioKind::SingleTube:
            require(geometry.radius > 0.0, "geometry.radius must be positive");
            require(geometry.rho_factor >= 1.0, "geometry.rho_factor must be >= 1");
            require(geometry.radius * geometry.rho_factor < grid.extent, "kernel support exceeds the radial grid");
            require(!geometry.u_e.empty(), "geometry.u_e needs one value");
            require(law.kind != LawKind::VanGenuchtenMualem, "single_tube expects a constant or exponential law");
            break;
        case ScenarioKind::ParallelTubes:
        case ScenarioKind::DeltaStudy:
        case ScenarioKind::KernelRadiusStudy:
            require(geometry.u_e.size() == 3, "geometry.u_e needs three values (one per tube)");
            require(geometry.r_max > 0.0 && geometry.r_max_reference > 0.0, "geometry.r_max must be positive");
            for (double r : study.r_max_values) require(r > 0.0, "study.r_max_values must be positive");
            require(geometry.rho_factor >= 1.0, "geometry.rho_factor must be >= 1");
            for (double f : study.rho_factors) require(f >= 1.0, "study.rho_factors must be >= 1");
            require(study.fixed_cells >= 1, "study.fixed_cells must be >= 1");
            require(law.kind != LawKind::VanGenuchtenMualem, "tube studies expect a constant or exponential law");
            break;
        case ScenarioKind::RootSoil: {
            require(law.kind == LawKind::VanGenuchtenMualem, "root_soil expects law.type = van_genuchten_mualem");
            require(!root_soil.collar_pressures.empty(), "root_soil.collar_pressures must not be empty");
            require(root_soil.domain_lo.size() == 3 && root_soil.domain_hi.size() == 3,
                    "root_soil.domain_lo/domain_hi need three values");
            for (int a = 0; a < 3; ++a)
                require(root_soil.domain_hi[a] > root_soil.domain_lo[a], "root_soil domain is empty");
            require(!root_soil.grids.empty(), "root_soil.grids must not be empty");
            for (const auto& g : root_soil.grids) (void)parse_grid_spec(g);
            require(root_soil.network == "synthetic" || std::filesystem::is_regular_file(root_soil.network),
                    "root_soil.network file '" + root_soil.network + "' does not exist");
            require(root_soil.max_cell_length > 0.0, "root_soil.max_cell_length must be positive");
            if (std::isnan(root_soil.soil_pressure))
                require(root_soil.water_saturation > 0.0 && root_soil.water_saturation <= 1.0,
                        "root_soil.water_saturation must be in (0, 1]");
            break;
        }
    }
    (void)make_law();
}

DiffusionLaw ScenarioConfig::make_law() const {
    switch (law.kind) {
        case LawKind::Constant:
            return DiffusionLaw::constant(law.d0);
        case LawKind::Exponential:
            return DiffusionLaw::exponential(law.d0, law.k, law.d_min);
        case LawKind::VanGenuchtenMualem: {
            VanGenuchtenMualemLaw p;
            p.permeability = law.permeability;
            p.viscosity = law.viscosity;
            p.theta_r = law.theta_r;
            p.theta_s = law.theta_s;
            p.alpha = law.alpha;
            p.n = law.n;
            p.lambda = law.lambda;
            p.p_ref = law.p_ref;
            p.d_min = law.vgm_d_min;
            auto l = DiffusionLaw::van_genuchten_mualem(p);
            if (law.table_samples > 0) return l.with_table(law.table_lo, law.table_hi, law.table_samples);
            return l;
        }
    }
    throw ConfigError("unknown law");
}

NewtonControls ScenarioConfig::newton_controls() const {
    NewtonControls c;
    c.abs_tol = solver.abs_tol;
    c.rel_tol = solver.rel_tol;
    c.max_iterations = solver.max_iterations;
    c.max_halvings = solver.max_halvings;
    c.linear_solver = solver.linear_solver;
    return c;
}

ScenarioConfig parse_config(std::istream& in, const std::string& source, const std::string& base_directory) {
    std::vector<Entry> entries;
    std::string line, section;
    int lineno = 0;
    auto fail = [&](int l, const std::string& msg) -> ConfigError {
        return ConfigError(source + ":" + std::to_string(l) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw fail(lineno, "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (!known_section(section)) throw fail(lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw fail(lineno, "expected 'key = value', got '" + line + "'");
        if (section.empty()) throw fail(lineno, "key outside of any section");
        const std::string key = trim(line.substr(0, eq));
        if (!find_field(section, key)) throw fail(lineno, "unknown key '" + key + "' in section [" + section + "]");
        for (const auto& e : entries)
            if (e.section == section && e.key == key)
                throw fail(lineno, "duplicate key '" + key + "' (first set on line " + std::to_string(e.line) + ")");
        entries.push_back({lineno, section, key, trim(line.substr(eq + 1))});
    }

    // The scenario kind selects the defaults the remaining keys override.
    ScenarioConfig cfg;
    bool have_kind = false;
    for (const auto& e : entries)
        if (e.section == "scenario" && e.key == "kind") {
            try {
                cfg = default_config(parse_kind(e.value));
            } catch (const ConfigError& err) {
                throw fail(e.line, err.what());
            }
            have_kind = true;
        }
    if (!have_kind) throw ConfigError(source + ": missing [scenario] kind");
    for (const auto& e : entries) {
        try {
            find_field(e.section, e.key)->set(cfg, e.value);
        } catch (const ConfigError& err) {
            throw fail(e.line, e.key + ": " + err.what());
        }
    }
    if (!base_directory.empty() && cfg.root_soil.network != "synthetic") {
        const std::filesystem::path p(cfg.root_soil.network);
        if (p.is_relative()) cfg.root_soil.network = (std::filesystem::path(base_directory) / p).lexically_normal().string();
    }
    try {
        cfg.validate();
    } catch (const ConfigError& err) {
        throw ConfigError(source + ": " + err.what());
    }
    return cfg;
}

ScenarioConfig parse_config_string(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    return parse_config(in, source);
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path, std::filesystem::path(path).parent_path().string());
}

void emit_config(std::ostream& out, const ScenarioConfig& config) {
    std::string section;
    for (const auto& f : fields()) {
        if (section != f.section) {
            if (!section.empty()) out << '\n';
            section = f.section;
            out << '[' << section << "]\n";
        }
        out << f.key << " = " << f.get(config) << '\n';
    }
}

std::string emit_config_string(const ScenarioConfig& config) {
    std::ostringstream out;
    emit_config(out, config);
    return out.str();
}

}  // namespace mdtube
