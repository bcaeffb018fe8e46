#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "mdtube/errors.hpp"
#include "mdtube/network.hpp"

using namespace mdtube;

namespace {

const char* kSample = R"(# two segments and a branch
node 1 0 0 0
node 2 0 0 -0.1   # trailing comment
node 3 0.05 0 -0.2
node 4 -0.05 0 -0.2

seg 10 1 2 0.002 3 1e-12 1e-17
seg 11 2 3 0.001 3 1e-12 1e-18
seg 12 2 4 0.001 2.5 2e-12 1e-18
bc 1 dirichlet -50000
bc 3 neumann
)";

std::string parse_error(const std::string& text) {
    std::istringstream in(text);
    try {
        TubeNetwork::parse(in, "net.txt");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

// Distance from p to the segment a-b.
double distance_to(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab{b.x - a.x, b.y - a.y, b.z - a.z};
    const double len2 = ab.x * ab.x + ab.y * ab.y + ab.z * ab.z;
    double t = ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y + (p.z - a.z) * ab.z) / len2;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p.x - (a.x + t * ab.x), dy = p.y - (a.y + t * ab.y), dz = p.z - (a.z + t * ab.z);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

TEST(NetworkFile, ParsesSample) {
    std::istringstream in(kSample);
    const auto net = TubeNetwork::parse(in);
    ASSERT_EQ(net.nodes().size(), 4u);
    ASSERT_EQ(net.segments().size(), 3u);
    EXPECT_EQ(net.segments()[2].id, 12);
    EXPECT_DOUBLE_EQ(net.segments()[2].rho, 2.5 * 0.001);
    EXPECT_DOUBLE_EQ(net.segments()[1].d_e, 1e-18);
    EXPECT_TRUE(net.boundary(net.node_index(1)).dirichlet);
    EXPECT_DOUBLE_EQ(net.boundary(net.node_index(1)).value, -50000);
    EXPECT_FALSE(net.boundary(net.node_index(3)).dirichlet);
    EXPECT_EQ(net.top_node(), net.node_index(1));
    EXPECT_NEAR(net.total_length(), 0.1 + 2 * std::hypot(0.05, 0.1), 1e-15);
    const auto deg = net.node_degrees();
    EXPECT_EQ(deg[net.node_index(2)], 3);
}

TEST(NetworkFile, WriteParseRoundTrip) {
    std::istringstream in(kSample);
    const auto net = TubeNetwork::parse(in);
    std::stringstream buf;
    net.write(buf);
    const auto again = TubeNetwork::parse(buf);
    ASSERT_EQ(again.segments().size(), net.segments().size());
    for (std::size_t i = 0; i < net.segments().size(); ++i) {
        EXPECT_EQ(again.segments()[i].id, net.segments()[i].id);
        EXPECT_EQ(again.segments()[i].radius, net.segments()[i].radius);
        EXPECT_EQ(again.segments()[i].rho, net.segments()[i].rho);
        EXPECT_EQ(again.segments()[i].gamma, net.segments()[i].gamma);
        EXPECT_EQ(again.segments()[i].d_e, net.segments()[i].d_e);
    }
    EXPECT_EQ(again.boundary(again.node_index(1)).value, -50000);
}

TEST(NetworkFile, ErrorsCarryLineNumbers) {
    EXPECT_NE(parse_error("node 1 0 0 0\nnode 1 0 0 1\n").find("net.txt:2"), std::string::npos);
    EXPECT_NE(parse_error("node 1 0 0 0\n\nseg 1 1 7 0.1 2 1 1\n").find("net.txt:3"), std::string::npos);
    EXPECT_NE(parse_error("# c\nedge 1 2\n").find("net.txt:2"), std::string::npos);
    EXPECT_NE(parse_error("node 1 0 0 zero\n").find("net.txt:1"), std::string::npos);
    EXPECT_NE(parse_error("node 1 0 0 0\nnode 2 0 0 1\nseg 1 1 2 -0.1 2 1 1\n").find("net.txt:3"),
              std::string::npos);
    EXPECT_NE(parse_error("node 1 0 0 0\nbc 1 robin 3\n").find("net.txt:2"), std::string::npos);
}

TEST(Discretize, SplitsSegmentsAndKeepsConnectivity) {
    std::istringstream in(kSample);
    const auto net = TubeNetwork::parse(in);
    const auto mesh = discretize(net, 0.03);
    // 0.1 -> 4 cells, 0.1118 -> 4 cells each
    EXPECT_EQ(mesh.num_cells(), 12);
    EXPECT_EQ(mesh.num_nodes(), 4 + 3 * 3);
    double len = 0.0;
    for (const auto& c : mesh.cells) len += c.length();
    EXPECT_NEAR(len, net.total_length(), 1e-15);
    const int junction = mesh.original_node[net.node_index(2)];
    EXPECT_EQ(mesh.node_cells[junction].size(), 3u);
    EXPECT_TRUE(mesh.node_bc[mesh.original_node[net.node_index(1)]].dirichlet);
}

TEST(Kernel, DiscRectangleArea) {
    const double pi = std::numbers::pi;
    EXPECT_NEAR(disc_rectangle_area(0, 0, 1, -2, 2, -2, 2), pi, 1e-14);
    EXPECT_NEAR(disc_rectangle_area(0, 0, 1, 0, 2, 0, 2), pi / 4, 1e-14);
    EXPECT_NEAR(disc_rectangle_area(0, 0, 1, -2, 0, -2, 2), pi / 2, 1e-14);
    EXPECT_DOUBLE_EQ(disc_rectangle_area(0, 0, 1, 2, 3, 2, 3), 0.0);
    // Monte Carlo oracle for a generic overlap
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    const double cx = 0.13, cy = -0.21, rho = 0.7;
    const double x0 = -0.2, x1 = 0.4, y0 = -0.6, y1 = 0.05;
    const int n = 2000000;
    int hit = 0;
    for (int i = 0; i < n; ++i) {
        const double x = cx + rho * d(rng), y = cy + rho * d(rng);
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= rho * rho && x >= x0 && x <= x1 && y >= y0 && y <= y1) ++hit;
    }
    const double mc = 4 * rho * rho * hit / n;
    const double sigma = 4 * rho * rho * std::sqrt(0.25 / n);
    EXPECT_NEAR(disc_rectangle_area(cx, cy, rho, x0, x1, y0, y1), mc, 4 * sigma);
}

TEST(Kernel, PlanarWeightsMatchMonteCarlo) {
    const auto grid = BulkGrid::planar(-1, -1, 1, 1, 4, 4);
    TubeNetwork net;
    net.add_node(0, {0.1, -0.15, 0});
    net.add_node(1, {0.1, -0.15, 1});
    net.add_segment(0, 0, 1, 0.1, 4.0, 1.0, 0.0);  // rho = 0.4
    const auto mesh = discretize(net, 10.0);
    const auto cp = build_coupling(grid, mesh);
    ASSERT_EQ(cp.cells.size(), 1u);
    double sum = 0.0;
    std::vector<double> w(grid.num_cells(), 0.0);
    for (const auto& [c, wc] : cp.cells[0].weights) {
        w[c] = wc;
        sum += wc;
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> d(-0.4, 0.4);
    const int n = 1000000;
    std::vector<int> hits(grid.num_cells(), 0);
    int inside = 0;
    while (inside < n) {
        const double x = d(rng), y = d(rng);
        if (x * x + y * y > 0.16) continue;
        ++inside;
        ++hits[grid.locate({0.1 + x, -0.15 + y, 0.5})];
    }
    for (int c = 0; c < grid.num_cells(); ++c) {
        const double p = static_cast<double>(hits[c]) / n;
        EXPECT_NEAR(w[c], p, 5 * std::sqrt(std::max(p * (1 - p), 1e-12) / n) + 1e-9) << "cell " << c;
    }
}

TEST(Kernel, ObliqueFractionMatchesMonteCarlo) {
    const LineSegment line{{0.1, 0.2, 0.1}, {0.8, 0.7, 0.9}};
    const double rho = 0.15;
    const Box box{{0.3, 0.3, 0.3}, {0.6, 0.6, 0.6}};
    CouplingOptions co;
    co.refinement_levels = 6;
    const double frac = kernel_fraction(box, line, rho, co);
    // sample the cylinder {p : |p - axis| <= rho, projection within the segment}
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const Vec3 a = line.a, b = line.b;
    const Vec3 ab{b.x - a.x, b.y - a.y, b.z - a.z};
    const double len = std::sqrt(ab.x * ab.x + ab.y * ab.y + ab.z * ab.z);
    const Vec3 e{ab.x / len, ab.y / len, ab.z / len};
    Vec3 n1{-e.y, e.x, 0.0};
    const double n1n = std::hypot(n1.x, n1.y);
    n1 = {n1.x / n1n, n1.y / n1n, 0.0};
    const Vec3 n2{e.y * n1.z - e.z * n1.y, e.z * n1.x - e.x * n1.z, e.x * n1.y - e.y * n1.x};
    const int n = 2000000;
    int hit = 0;
    for (int i = 0; i < n; ++i) {
        const double t = u01(rng) * len;
        const double r = rho * std::sqrt(u01(rng));
        const double phi = 2 * std::numbers::pi * u01(rng);
        const double c = r * std::cos(phi), s = r * std::sin(phi);
        const Vec3 p{a.x + t * e.x + c * n1.x + s * n2.x, a.y + t * e.y + c * n1.y + s * n2.y,
                     a.z + t * e.z + c * n1.z + s * n2.z};
        if (p.x >= box.lo.x && p.x <= box.hi.x && p.y >= box.lo.y && p.y <= box.hi.y && p.z >= box.lo.z &&
            p.z <= box.hi.z)
            ++hit;
    }
    const double mc = static_cast<double>(hit) / n;
    EXPECT_NEAR(frac, mc, 4 * std::sqrt(mc * (1 - mc) / n) + 2e-4);
}

TEST(MeanDistance, AxisThroughCubeCenter) {
    // mean of sqrt(x² + y²) over a square of side a: a(√2 + ln(1 + √2))/6
    const double a = 0.4;
    const Box box{{0, 0, 0}, {a, a, a}};
    const LineSegment line{{a / 2, a / 2, 0}, {a / 2, a / 2, a}};
    const double exact = a * (std::sqrt(2.0) + std::log(1.0 + std::sqrt(2.0))) / 6.0;
    EXPECT_NEAR(exact / a, 0.3826, 1e-4);
    EXPECT_NEAR(mean_distance(box, line, 4, 8), exact, 1e-3 * exact);
}

TEST(MeanDistance, ObliqueSegmentMatchesMonteCarlo) {
    const Box box{{0, 0, 0}, {1, 1, 1}};
    const LineSegment line{{0.1, 0.3, 0.2}, {0.9, 0.6, 0.7}};
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int n = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = distance_to({u01(rng), u01(rng), u01(rng)}, line.a, line.b);
        sum += d;
        sum2 += d * d;
    }
    const double mc = sum / n;
    const double sigma = std::sqrt((sum2 / n - mc * mc) / n);
    EXPECT_NEAR(mean_distance(box, line, 4, 8), mc, 5 * sigma + 2e-3 * mc);
}

TEST(MeanDistance, Annulus) {
    // mean of r over a disc of radius h with area weight: 2h/3
    EXPECT_NEAR(mean_distance_annulus(0.0, 0.3), 0.2, 1e-14);
    // annulus: (2/3)(r1³ - r0³)/(r1² - r0²)
    EXPECT_NEAR(mean_distance_annulus(0.1, 0.2), 2.0 / 3.0 * (0.008 - 0.001) / (0.04 - 0.01), 1e-14);
}

TEST(Coupling, HostCellsAndClipping) {
    const auto grid = BulkGrid::planar(-1, -1, 1, 1, 4, 4);
    TubeNetwork net;
    net.add_node(0, {0.0, 0.0, 0});
    net.add_node(1, {0.0, 0.0, 1});
    net.add_node(2, {0.9, 0.9, 0});
    net.add_node(3, {0.9, 0.9, 1});
    net.add_segment(0, 0, 1, 0.05, 2.0, 1.0, 0.0);
    net.add_segment(1, 2, 3, 0.05, 4.0, 1.0, 0.0);  // support crosses the corner
    const auto mesh = discretize(net, 10.0);
    CouplingOptions keep;
    keep.renormalize_clipped = false;
    const auto raw = build_coupling(grid, mesh, keep);
    EXPECT_EQ(raw.cells[0].hosts.size(), 4u);  // midpoint on a shared vertex
    EXPECT_FALSE(raw.cells[0].clipped);
    EXPECT_TRUE(raw.cells[1].clipped);
    double sum = 0.0;
    for (const auto& [c, w] : raw.cells[1].weights) sum += w;
    EXPECT_LT(sum, 1.0);
    EXPECT_EQ(raw.num_clipped(), 1);
    const auto norm = build_coupling(grid, mesh);
    sum = 0.0;
    for (const auto& [c, w] : norm.cells[1].weights) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-14);
}

TEST(Coupling, ThreadCountDoesNotChangeWeights) {
    const auto grid = BulkGrid::cartesian({-0.04, -0.04, -0.15}, {0.04, 0.04, 0}, 8, 8, 10);
    RootGeneratorOptions ro;
    ro.taproot_length = 0.08;
    const auto mesh = discretize(synthetic_root_system(ro), 1.0);
    CouplingOptions one, four;
    one.mean_distance = four.mean_distance = true;
    four.threads = 4;
    const auto a = build_coupling(grid, mesh, one), b = build_coupling(grid, mesh, four);
    ASSERT_EQ(a.cells.size(), b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        EXPECT_EQ(a.cells[i].weights, b.cells[i].weights);
        EXPECT_EQ(a.cells[i].delta, b.cells[i].delta);
    }
}

TEST(RootGenerator, DeterministicTree) {
    const auto a = synthetic_root_system();
    const auto b = synthetic_root_system();
    ASSERT_EQ(a.segments().size(), b.segments().size());
    for (std::size_t i = 0; i < a.segments().size(); ++i) {
        EXPECT_EQ(a.segments()[i].radius, b.segments()[i].radius);
        EXPECT_EQ(a.line(i).b.z, b.line(i).b.z);
    }
    // frozen: the default network
    EXPECT_EQ(a.segments().size(), 209u);
    EXPECT_EQ(a.nodes().size(), a.segments().size() + 1);  // a tree
    double rmin = 1.0, rmax = 0.0;
    for (const auto& s : a.segments()) {
        rmin = std::min(rmin, s.radius);
        rmax = std::max(rmax, s.radius);
        EXPECT_NEAR(s.rho, 3.0 * s.radius, 1e-15);
    }
    EXPECT_GE(rmin, 0.0002);
    EXPECT_LE(rmax, 0.002);
    EXPECT_EQ(a.top_node(), 0);
    for (const auto& n : a.nodes()) EXPECT_LE(n.position.z, 0.0);
    const auto other = synthetic_root_system({.seed = 9});
    EXPECT_NE(other.total_length(), a.total_length());
}
