#include "mdtube/network.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "mdtube/errors.hpp"
#include "mdtube/numerics.hpp"

namespace mdtube {

double NetworkSegment::perimeter() const { return 2.0 * std::numbers::pi * radius; }
double SegmentCell::perimeter() const { return 2.0 * std::numbers::pi * radius; }

int TubeNetwork::add_node(int id, const Vec3& position) {
    if (node_lookup_.count(id)) throw ConfigError("duplicate node id " + std::to_string(id));
    node_lookup_[id] = static_cast<int>(nodes_.size());
    nodes_.push_back({id, position});
    return static_cast<int>(nodes_.size()) - 1;
}

int TubeNetwork::add_segment(int id, int node_a, int node_b, double radius, double rho_factor,
                             double gamma, double d_e) {
    for (const auto& s : segments_)
        if (s.id == id) throw ConfigError("duplicate segment id " + std::to_string(id));
    NetworkSegment s;
    s.id = id;
    s.a = node_index(node_a);
    s.b = node_index(node_b);
    if (!(radius > 0.0)) throw ConfigError("segment " + std::to_string(id) + ": radius must be > 0");
    if (!(rho_factor >= 1.0))
        throw ConfigError("segment " + std::to_string(id) + ": kernel radius smaller than tube radius");
    if (gamma < 0.0 || d_e < 0.0)
        throw ConfigError("segment " + std::to_string(id) + ": negative permeability");
    s.radius = radius;
    s.rho = rho_factor * radius;
    s.gamma = gamma;
    s.d_e = d_e;
    if (!(distance(nodes_[s.a].position, nodes_[s.b].position) > 0.0))
        throw ConfigError("segment " + std::to_string(id) + " has zero length");
    segments_.push_back(s);
    return static_cast<int>(segments_.size()) - 1;
}

int TubeNetwork::node_index(int id) const {
    auto it = node_lookup_.find(id);
    if (it == node_lookup_.end()) throw ConfigError("unknown node id " + std::to_string(id));
    return it->second;
}

LineSegment TubeNetwork::line(int segment) const {
    const auto& s = segments_.at(segment);
    return {nodes_[s.a].position, nodes_[s.b].position};
}

double TubeNetwork::total_length() const {
    double sum = 0.0;
    for (int i = 0; i < static_cast<int>(segments_.size()); ++i) sum += length(i);
    return sum;
}

std::vector<int> TubeNetwork::node_degrees() const {
    std::vector<int> deg(nodes_.size(), 0);
    for (const auto& s : segments_) {
        ++deg[s.a];
        ++deg[s.b];
    }
    return deg;
}

void TubeNetwork::set_boundary(int node_index, NodeBoundary bc) {
    if (node_index < 0 || node_index >= static_cast<int>(nodes_.size()))
        throw ConfigError("boundary condition on unknown node");
    if (bc.dirichlet)
        bc_[node_index] = bc;
    else
        bc_.erase(node_index);
}

NodeBoundary TubeNetwork::boundary(int node_index) const {
    auto it = bc_.find(node_index);
    return it == bc_.end() ? NodeBoundary{} : it->second;
}

int TubeNetwork::top_node() const {
    if (nodes_.empty()) throw ConfigError("empty network");
    int best = 0;
    for (int i = 1; i < static_cast<int>(nodes_.size()); ++i)
        if (nodes_[i].position.z > nodes_[best].position.z) best = i;
    return best;
}

TubeNetwork TubeNetwork::parse(std::istream& in, const std::string& source) {
    TubeNetwork net;
    std::string raw;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::string kind;
        if (!(ls >> kind)) continue;
        try {
            if (kind == "node") {
                int id;
                Vec3 p;
                if (!(ls >> id >> p.x >> p.y >> p.z)) fail("expected: node <id> <x> <y> <z>");
                net.add_node(id, p);
            } else if (kind == "seg") {
                int id, a, b;
                double r, f, g, de;
                if (!(ls >> id >> a >> b >> r >> f >> g >> de))
                    fail("expected: seg <id> <a> <b> <R> <rho_factor> <gamma> <D_e>");
                net.add_segment(id, a, b, r, f, g, de);
            } else if (kind == "bc") {
                int id;
                std::string type;
                if (!(ls >> id >> type)) fail("expected: bc <node_id> dirichlet <value> | neumann");
                if (type == "dirichlet") {
                    double v;
                    if (!(ls >> v)) fail("missing Dirichlet value");
                    net.set_boundary(net.node_index(id), {true, v});
                } else if (type == "neumann") {
                    net.set_boundary(net.node_index(id), {});
                } else {
                    fail("unknown boundary type '" + type + "'");
                }
            } else {
                fail("unknown record '" + kind + "'");
            }
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            if (msg.rfind(source + ":", 0) == 0) throw;
            fail(msg);
        }
        std::string extra;
        if (ls >> extra) fail("trailing token '" + extra + "'");
    }
    if (net.segments_.empty()) throw ConfigError(source + ": network has no segments");
    return net;
}

TubeNetwork TubeNetwork::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open network file " + path);
    return parse(in, path);
}

void TubeNetwork::write(std::ostream& out) const {
    out.precision(17);
    for (const auto& n : nodes_)
        out << "node " << n.id << ' ' << n.position.x << ' ' << n.position.y << ' ' << n.position.z
            << '\n';
    for (const auto& s : segments_)
        out << "seg " << s.id << ' ' << nodes_[s.a].id << ' ' << nodes_[s.b].id << ' ' << s.radius
            << ' ' << s.rho_factor() << ' ' << s.gamma << ' ' << s.d_e << '\n';
    std::vector<int> keys;
    for (const auto& [k, v] : bc_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (int k : keys) out << "bc " << nodes_[k].id << " dirichlet " << bc_.at(k).value << '\n';
}

NetworkMesh discretize(const TubeNetwork& net, double max_cell_length) {
    if (!(max_cell_length > 0.0)) throw ConfigError("max_cell_length must be positive");
    NetworkMesh mesh;
    const auto& nodes = net.nodes();
    for (const auto& n : nodes) mesh.nodes.push_back(n.position);
    mesh.original_node.resize(nodes.size());
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) mesh.original_node[i] = i;

    for (int s = 0; s < static_cast<int>(net.segments().size()); ++s) {
        const auto& seg = net.segments()[s];
        const LineSegment line = net.line(s);
        const int parts = std::max(1, static_cast<int>(std::ceil(line.length() / max_cell_length - 1e-9)));
        int prev = seg.a;
        for (int p = 0; p < parts; ++p) {
            int next;
            if (p + 1 == parts) {
                next = seg.b;
            } else {
                const double t = static_cast<double>(p + 1) / parts;
                mesh.nodes.push_back(line.a + t * (line.b - line.a));
                next = static_cast<int>(mesh.nodes.size()) - 1;
            }
            SegmentCell c;
            c.segment = s;
            c.line = {mesh.nodes[prev], mesh.nodes[next]};
            c.radius = seg.radius;
            c.rho = seg.rho;
            c.gamma = seg.gamma;
            c.d_e = seg.d_e;
            c.node_a = prev;
            c.node_b = next;
            mesh.cells.push_back(c);
            prev = next;
        }
    }
    mesh.node_bc.assign(mesh.nodes.size(), NodeBoundary{});
    for (const auto& [k, v] : net.boundaries()) mesh.node_bc[k] = v;
    mesh.node_cells.assign(mesh.nodes.size(), {});
    for (int c = 0; c < mesh.num_cells(); ++c) {
        mesh.node_cells[mesh.cells[c].node_a].push_back(c);
        mesh.node_cells[mesh.cells[c].node_b].push_back(c);
    }
    return mesh;
}

double kernel_value(double r, double rho) {
    return r <= rho ? 1.0 / (std::numbers::pi * rho * rho) : 0.0;
}

std::vector<KernelWeight> CouplingMap::flat() const {
    std::vector<KernelWeight> out;
    for (int i = 0; i < static_cast<int>(cells.size()); ++i)
        for (const auto& [cell, w] : cells[i].weights) out.push_back({i, cell, w});
    return out;
}

int CouplingMap::num_clipped() const {
    return static_cast<int>(std::count_if(cells.begin(), cells.end(),
                                          [](const SegmentCoupling& c) { return c.clipped; }));
}

namespace {

// Antiderivative of sqrt(rho² - x²) on [-rho, rho].
double half_chord_integral(double x, double rho) {
    x = std::clamp(x, -rho, rho);
    return 0.5 * (x * std::sqrt(std::max(0.0, rho * rho - x * x)) + rho * rho * std::asin(x / rho));
}

// Area of {(x, y) : a <= x <= b, y <= Y} inside the disc of radius rho at the origin.
double disc_strip_below(double a, double b, double Y, double rho) {
    a = std::max(a, -rho);
    b = std::min(b, rho);
    if (b <= a) return 0.0;
    if (Y >= rho) return 2.0 * (half_chord_integral(b, rho) - half_chord_integral(a, rho));
    if (Y <= -rho) return 0.0;
    const double xs = std::sqrt(rho * rho - Y * Y);
    const double lo = std::max(a, -xs), hi = std::min(b, xs);
    const double inner_len = std::max(0.0, hi - lo);
    const double inner_s = inner_len > 0.0 ? half_chord_integral(hi, rho) - half_chord_integral(lo, rho) : 0.0;
    if (Y >= 0.0) {
        const double all_s = half_chord_integral(b, rho) - half_chord_integral(a, rho);
        return all_s + (all_s - inner_s) + Y * inner_len;
    }
    return inner_s + Y * inner_len;
}

bool inside_cylinder(const Vec3& p, const LineSegment& line, double len, double rho) {
    const double t = line.axial(p);
    if (t < 0.0 || t > len) return false;
    return line.radial_distance(p) <= rho;
}

double octasection(const Box& box, const LineSegment& line, double len, double rho, int depth,
                   const GaussRule& rule) {
    const Vec3 c = box.center();
    const Vec3 s = box.size();
    const double half_diag = 0.5 * norm(s);
    if (line.distance_to(c) > rho + half_diag) return 0.0;
    bool all_in = true;
    for (int k = 0; k < 8 && all_in; ++k) {
        const Vec3 p{k & 1 ? box.hi.x : box.lo.x, k & 2 ? box.hi.y : box.lo.y,
                     k & 4 ? box.hi.z : box.lo.z};
        all_in = inside_cylinder(p, line, len, rho);
    }
    if (all_in) return box.volume();
    if (depth == 0) {
        double sum = 0.0;
        const int q = static_cast<int>(rule.nodes.size());
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j)
                for (int k = 0; k < q; ++k) {
                    const Vec3 p{c.x + 0.5 * s.x * rule.nodes[i], c.y + 0.5 * s.y * rule.nodes[j],
                                 c.z + 0.5 * s.z * rule.nodes[k]};
                    if (inside_cylinder(p, line, len, rho))
                        sum += rule.weights[i] * rule.weights[j] * rule.weights[k];
                }
        return sum * box.volume() / 8.0;
    }
    double sum = 0.0;
    for (int k = 0; k < 8; ++k) {
        Box sub;
        sub.lo = {k & 1 ? c.x : box.lo.x, k & 2 ? c.y : box.lo.y, k & 4 ? c.z : box.lo.z};
        sub.hi = {k & 1 ? box.hi.x : c.x, k & 2 ? box.hi.y : c.y, k & 4 ? box.hi.z : c.z};
        sum += octasection(sub, line, len, rho, depth - 1, rule);
    }
    return sum;
}

// Axis along which the segment runs, or -1 if it is oblique.
int aligned_axis(const LineSegment& line) {
    const Vec3 d = line.b - line.a;
    const double len = norm(d);
    for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        if (std::abs(d[b]) <= 1e-12 * len && std::abs(d[c]) <= 1e-12 * len) return a;
    }
    return -1;
}

double aligned_fraction(const Box& box, const LineSegment& line, double rho, int axis) {
    const int b = (axis + 1) % 3, c = (axis + 2) % 3;
    const double t0 = std::min(line.a[axis], line.b[axis]);
    const double t1 = std::max(line.a[axis], line.b[axis]);
    const double overlap = std::min(t1, box.hi[axis]) - std::max(t0, box.lo[axis]);
    if (overlap <= 0.0) return 0.0;
    const double area = disc_rectangle_area(line.a[b], line.a[c], rho, box.lo[b], box.hi[b],
                                            box.lo[c], box.hi[c]);
    return area * overlap / (std::numbers::pi * rho * rho * (t1 - t0));
}

// Index range of cells intersecting [lo, hi] along one axis.
std::pair<int, int> cell_range(const BulkGrid& grid, int axis, double lo, double hi) {
    const double h = grid.spacing()[axis];
    const int n = grid.cells()[axis];
    const int a = std::clamp(static_cast<int>(std::floor((lo - grid.lo()[axis]) / h)), 0, n - 1);
    const int b = std::clamp(static_cast<int>(std::floor((hi - grid.lo()[axis]) / h)), 0, n - 1);
    return {a, b};
}

bool support_inside(const BulkGrid& grid, const LineSegment& line, double rho) {
    const Vec3 d = line.b - line.a;
    const double len = norm(d);
    const int dims = grid.kind() == GridKind::Planar2D ? 2 : 3;
    for (int a = 0; a < 3; ++a) {
        const double u = d[a] / len;
        const double ext = rho * std::sqrt(std::max(0.0, 1.0 - u * u));
        const double lo = std::min(line.a[a], line.b[a]) - ext;
        const double hi = std::max(line.a[a], line.b[a]) + ext;
        const double tol = 1e-12 * std::max(1.0, std::abs(grid.hi()[a] - grid.lo()[a]));
        if (a >= dims && grid.kind() == GridKind::Planar2D) {
            // the extruded direction: only the segment itself must fit
            if (std::min(line.a[a], line.b[a]) < grid.lo()[a] - tol ||
                std::max(line.a[a], line.b[a]) > grid.hi()[a] + tol)
                return false;
            continue;
        }
        if (lo < grid.lo()[a] - tol || hi > grid.hi()[a] + tol) return false;
    }
    return true;
}

SegmentCoupling couple_radial(const BulkGrid& grid, const SegmentCell& cell,
                              const CouplingOptions& options) {
    SegmentCoupling out;
    const double rho = cell.rho;
    const double h = grid.spacing().x;
    for (int i = 0; i < grid.num_cells(); ++i) {
        const double r0 = i * h, r1 = r0 + h;
        const double a = std::min(r1, rho), b = std::min(r0, rho);
        const double w = (a * a - b * b) / (rho * rho);
        if (w > 0.0) out.weights.emplace_back(i, w);
    }
    out.clipped = rho > grid.hi().x * (1.0 + 1e-12);
    for (const auto& [c, w] : out.weights) out.weight_sum += w;
    out.hosts = {{0, 1.0}};
    if (options.mean_distance) out.delta = std::min(mean_distance_annulus(0.0, h), rho * (1.0 - 1e-6));
    return out;
}

SegmentCoupling couple_cell(const BulkGrid& grid, const SegmentCell& cell,
                            const CouplingOptions& options) {
    SegmentCoupling out;
    const LineSegment& line = cell.line;
    const double rho = cell.rho;
    const double len = line.length();
    const int axis = aligned_axis(line);
    const GaussRule& rule = gauss_legendre(std::max(1, options.quadrature_order));

    std::array<std::pair<int, int>, 3> range;
    for (int a = 0; a < 3; ++a) {
        if (grid.cells()[a] == 1) {
            range[a] = {0, 0};
            continue;
        }
        const double lo = std::min(line.a[a], line.b[a]) - rho;
        const double hi = std::max(line.a[a], line.b[a]) + rho;
        if (hi < grid.lo()[a] || lo > grid.hi()[a])
            throw ConfigError("segment cell kernel support lies outside the bulk grid");
        range[a] = cell_range(grid, a, lo, hi);
    }

    for (int k = range[2].first; k <= range[2].second; ++k)
        for (int j = range[1].first; j <= range[1].second; ++j)
            for (int i = range[0].first; i <= range[0].second; ++i) {
                const int c = grid.index(i, j, k);
                const Box box = grid.box(c);
                double w;
                if (axis >= 0) {
                    w = aligned_fraction(box, line, rho, axis);
                } else {
                    const double size = std::max({box.size().x, box.size().y, box.size().z});
                    const int depth = std::clamp(
                        static_cast<int>(std::ceil(std::log2(size / rho))) + options.refinement_levels, 0, 12);
                    w = octasection(box, line, len, rho, depth, rule) /
                        (std::numbers::pi * rho * rho * len);
                }
                if (w > 0.0) out.weights.emplace_back(c, w);
            }
    if (out.weights.empty()) throw ConfigError("segment cell kernel support lies outside the bulk grid");
    for (const auto& [c, w] : out.weights) out.weight_sum += w;
    out.clipped = !support_inside(grid, line, rho);
    if (!out.clipped || options.renormalize_clipped)
        for (auto& [c, w] : out.weights) w /= out.weight_sum;

    const auto hosts = grid.locate_all(line.midpoint());
    if (hosts.empty()) throw ConfigError("segment cell midpoint lies outside the bulk grid");
    for (int h : hosts) out.hosts.emplace_back(h, 1.0 / static_cast<double>(hosts.size()));
    if (options.mean_distance) {
        double d = 0.0;
        for (const auto& [h, a] : out.hosts) d += a * mean_distance(grid.box(h), line, 4, 8);
        out.delta = std::min(d, rho * (1.0 - 1e-6));
    }
    return out;
}

}  // namespace

double disc_rectangle_area(double cx, double cy, double rho, double x0, double x1, double y0,
                           double y1) {
    const double a = x0 - cx, b = x1 - cx;
    return std::max(0.0, disc_strip_below(a, b, y1 - cy, rho) - disc_strip_below(a, b, y0 - cy, rho));
}

double kernel_fraction(const Box& box, const LineSegment& line, double rho,
                       const CouplingOptions& options) {
    const int axis = aligned_axis(line);
    if (axis >= 0) return aligned_fraction(box, line, rho, axis);
    const double len = line.length();
    const double size = std::max({box.size().x, box.size().y, box.size().z});
    const int depth = std::clamp(
        static_cast<int>(std::ceil(std::log2(size / rho))) + options.refinement_levels, 0, 12);
    return octasection(box, line, len, rho, depth, gauss_legendre(std::max(1, options.quadrature_order))) /
           (std::numbers::pi * rho * rho * len);
}

double mean_distance(const Box& box, const LineSegment& line, int order, int subdivisions) {
    const GaussRule& rule = gauss_legendre(order);
    const Vec3 s = box.size();
    std::array<int, 3> m{};
    for (int a = 0; a < 3; ++a) m[a] = s[a] > 0.0 ? subdivisions : 1;
    const Vec3 sub{s.x / m[0], s.y / m[1], s.z / m[2]};
    const int q = static_cast<int>(rule.nodes.size());
    double sum = 0.0, wsum = 0.0;
    for (int k = 0; k < m[2]; ++k)
        for (int j = 0; j < m[1]; ++j)
            for (int i = 0; i < m[0]; ++i) {
                const Vec3 c{box.lo.x + (i + 0.5) * sub.x, box.lo.y + (j + 0.5) * sub.y,
                             box.lo.z + (k + 0.5) * sub.z};
                for (int a = 0; a < q; ++a)
                    for (int b = 0; b < q; ++b)
                        for (int d = 0; d < q; ++d) {
                            const double w = rule.weights[a] * rule.weights[b] * rule.weights[d];
                            const Vec3 p{c.x + 0.5 * sub.x * rule.nodes[a], c.y + 0.5 * sub.y * rule.nodes[b],
                                         c.z + 0.5 * sub.z * rule.nodes[d]};
                            sum += w * line.distance_to(p);
                            wsum += w;
                        }
            }
    return sum / wsum;
}

double mean_distance_annulus(double r0, double r1) {
    return 2.0 / 3.0 * (r1 * r1 * r1 - r0 * r0 * r0) / (r1 * r1 - r0 * r0);
}

CouplingMap build_coupling(const BulkGrid& grid, const NetworkMesh& mesh,
                           const CouplingOptions& options) {
    CouplingMap map;
    map.cells.resize(mesh.cells.size());
    if (grid.kind() == GridKind::Radial1D) {
        if (mesh.num_cells() != 1) throw ConfigError("a radial grid hosts exactly one segment cell");
        map.cells[0] = couple_radial(grid, mesh.cells[0], options);
        return map;
    }
    const int n = mesh.num_cells();
    const int threads = std::clamp(options.threads, 1, std::max(1, n));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                map.cells[i] = couple_cell(grid, mesh.cells[i], options);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return map;
}

TubeNetwork synthetic_root_system(const RootGeneratorOptions& o) {
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> wiggle(0.0, 1.0);

    TubeNetwork net;
    int next_node = 0, next_seg = 0;
    net.add_node(next_node++, o.collar);

    // taproot: mostly vertical with a small lateral drift
    std::vector<int> tap_nodes{0};
    const double dl = o.taproot_length / o.taproot_segments;
    Vec3 p = o.collar;
    for (int i = 1; i <= o.taproot_segments; ++i) {
        p = p + Vec3{0.08 * dl * wiggle(rng), 0.08 * dl * wiggle(rng), -dl};
        net.add_node(next_node, p);
        const double t = (i - 0.5) / o.taproot_segments;
        const double r = o.taproot_radius_top + t * (o.taproot_radius_tip - o.taproot_radius_top);
        net.add_segment(next_seg++, tap_nodes.back(), next_node, r, o.rho_factor, o.tap_kr, o.tap_kax);
        tap_nodes.push_back(next_node++);
    }

    // laterals from taproot nodes at roughly regular spacing, skipping the top and the tip
    const int stride = std::max(1, static_cast<int>(std::round(o.lateral_spacing / dl)));
    for (int i = stride; i + stride < static_cast<int>(tap_nodes.size()); i += stride) {
        const double depth_frac = static_cast<double>(i) / o.taproot_segments;
        const double azimuth = 2.0 * std::numbers::pi * unit(rng);
        const double dip = 0.15 + 0.5 * unit(rng);  // downward inclination
        const double length_scale = 1.0 - 0.6 * depth_frac;
        const double length =
            (o.lateral_length_min + (o.lateral_length_max - o.lateral_length_min) * unit(rng)) * length_scale;
        const int parts = std::max(1, static_cast<int>(std::round(length / o.lateral_segment_length)));
        const double step = length / parts;
        const double r0 = o.lateral_radius_min + (o.lateral_radius_max - o.lateral_radius_min) * unit(rng);
        Vec3 dir{std::cos(azimuth) * std::cos(dip), std::sin(azimuth) * std::cos(dip), -std::sin(dip)};
        int prev = tap_nodes[i];
        Vec3 q = net.nodes()[net.node_index(prev)].position;
        for (int s = 0; s < parts; ++s) {
            dir = dir + Vec3{0.1 * wiggle(rng), 0.1 * wiggle(rng), 0.05 * wiggle(rng)};
            dir = (1.0 / norm(dir)) * dir;
            q = q + step * dir;
            net.add_node(next_node, q);
            const double r = std::max(o.lateral_radius_min, r0 * (1.0 - 0.3 * (s + 0.5) / parts));
            net.add_segment(next_seg++, prev, next_node, r, o.rho_factor, o.lateral_kr, o.lateral_kax);
            prev = next_node++;
        }
    }
    return net;
}

}  // namespace mdtube
