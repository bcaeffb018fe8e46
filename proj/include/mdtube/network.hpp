#pragma once

// Embedded 1D tube networks, their segment-cell discretization, and the
// uniform-kernel coupling to a bulk grid.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdtube/bulk_grid.hpp"
#include "mdtube/geometry.hpp"

namespace mdtube {

struct NetworkNode {
    int id = 0;
    Vec3 position;
};

struct NetworkSegment {
    int id = 0;
    int a = 0;  ///< node index (not id)
    int b = 0;
    double radius = 0.0;
    double rho = 0.0;  ///< kernel radius
    double gamma = 0.0;
    double d_e = 0.0;

    double perimeter() const;
    double rho_factor() const { return rho / radius; }
};

/// Boundary data at a network node: Dirichlet value or zero flux.
struct NodeBoundary {
    bool dirichlet = false;
    double value = 0.0;
};

class TubeNetwork {
public:
    int add_node(int id, const Vec3& position);
    /// Node arguments are ids. rho = rho_factor * radius.
    int add_segment(int id, int node_a, int node_b, double radius, double rho_factor, double gamma,
                    double d_e);

    /// Reads the plain-text format:
    ///   node <id> <x> <y> <z>
    ///   seg <id> <node_a> <node_b> <R> <rho_factor> <gamma> <D_e>
    ///   bc <node_id> dirichlet <value> | bc <node_id> neumann
    /// '#' starts a comment. Errors carry "<source>:<line>".
    static TubeNetwork parse(std::istream& in, const std::string& source = "<stream>");
    static TubeNetwork load(const std::string& path);
    void write(std::ostream& out) const;

    const std::vector<NetworkNode>& nodes() const { return nodes_; }
    const std::vector<NetworkSegment>& segments() const { return segments_; }
    std::vector<NetworkSegment>& segments() { return segments_; }
    int node_index(int id) const;
    LineSegment line(int segment) const;
    double length(int segment) const { return line(segment).length(); }
    double total_length() const;
    std::vector<int> node_degrees() const;

    void set_boundary(int node_index, NodeBoundary bc);
    NodeBoundary boundary(int node_index) const;
    const std::unordered_map<int, NodeBoundary>& boundaries() const { return bc_; }

    /// Node with the largest z coordinate (first one on ties).
    int top_node() const;

private:
    std::vector<NetworkNode> nodes_;
    std::vector<NetworkSegment> segments_;
    std::unordered_map<int, int> node_lookup_;
    std::unordered_map<int, NodeBoundary> bc_;
};

/// A 1D finite-volume cell on the network. Each segment is split into
/// equal-length cells; mesh nodes are the original nodes plus split points.
struct SegmentCell {
    int segment = 0;
    LineSegment line;
    double radius = 0.0;
    double rho = 0.0;
    double gamma = 0.0;
    double d_e = 0.0;
    int node_a = 0;  ///< mesh node indices
    int node_b = 0;

    double length() const { return line.length(); }
    double perimeter() const;
};

struct NetworkMesh {
    std::vector<SegmentCell> cells;
    std::vector<Vec3> nodes;
    std::vector<NodeBoundary> node_bc;
    std::vector<std::vector<int>> node_cells;
    /// Mesh node index of each original network node.
    std::vector<int> original_node;

    int num_cells() const { return static_cast<int>(cells.size()); }
    int num_nodes() const { return static_cast<int>(nodes.size()); }
};

/// Splits every segment into ceil(length / max_cell_length) cells (at least one).
NetworkMesh discretize(const TubeNetwork& net, double max_cell_length);

/// Uniform kernel density: 1/(π ρ²) for r <= ρ, zero outside.
double kernel_value(double r, double rho);

struct KernelWeight {
    int segment_cell = 0;
    int bulk_cell = 0;
    double weight = 0.0;
};

struct SegmentCoupling {
    std::vector<std::pair<int, double>> weights;  ///< (bulk cell, weight)
    /// Cells sampled for u_{b,δ}: every cell containing the segment-cell
    /// midpoint, with equal weights.
    std::vector<std::pair<int, double>> hosts;
    double delta = 0.0;
    /// Kernel mass inside the grid before any normalization.
    double weight_sum = 0.0;
    bool clipped = false;
};

struct CouplingOptions {
    int quadrature_order = 3;
    /// Octasection stops when boxes are smaller than rho / 2^max_depth_rel.
    int refinement_levels = 4;
    bool mean_distance = false;
    /// Rescale kernels clipped by the domain boundary to unit mass, so the
    /// bulk receives exactly what the network exchanges.
    bool renormalize_clipped = true;
    int threads = 1;
};

struct CouplingMap {
    std::vector<SegmentCoupling> cells;

    std::vector<KernelWeight> flat() const;
    int num_clipped() const;
};

/// Kernel weights (fraction of each segment cell's source deposited per bulk
/// cell), host cells and optional mean distances. Throws ConfigError when a
/// segment cell's support misses the grid.
CouplingMap build_coupling(const BulkGrid& grid, const NetworkMesh& mesh,
                           const CouplingOptions& options = {});

/// Fraction of the kernel cylinder around `line` (radius rho) inside `box`.
double kernel_fraction(const Box& box, const LineSegment& line, double rho,
                       const CouplingOptions& options = {});

/// Exact area of the disc (center (cx, cy), radius rho) inside [x0,x1]x[y0,y1].
double disc_rectangle_area(double cx, double cy, double rho, double x0, double x1, double y0,
                           double y1);

/// Mean distance from points of `box` to the segment, composite Gauss rule
/// with `subdivisions` sub-boxes per resolved axis.
double mean_distance(const Box& box, const LineSegment& line, int order = 4, int subdivisions = 8);

/// Radial-grid mean distance over the annulus [r0, r1].
double mean_distance_annulus(double r0, double r1);

struct RootGeneratorOptions {
    std::uint64_t seed = 8;
    double taproot_length = 0.10;  ///< [m]
    int taproot_segments = 40;
    double taproot_radius_top = 0.002;
    double taproot_radius_tip = 0.001;
    double lateral_spacing = 0.004;
    double lateral_length_min = 0.01;
    double lateral_length_max = 0.03;
    double lateral_segment_length = 0.0015;
    double lateral_radius_min = 0.0002;
    double lateral_radius_max = 0.0005;
    double rho_factor = 3.0;
    double tap_kr = 3.47e-13;   ///< radial conductivity [m/(Pa s)]
    double lateral_kr = 1.16e-12;
    double tap_kax = 1.16e-17;  ///< axial conductivity [m^4/(Pa s)]
    double lateral_kax = 1.16e-18;
    Vec3 collar{0.0, 0.0, 0.0};
};

/// Deterministic taproot-with-laterals network growing downward from the collar.
TubeNetwork synthetic_root_system(const RootGeneratorOptions& options = {});

}  // namespace mdtube
