#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cmaflow/errors.hpp"
#include "cmaflow/point.hpp"

namespace cmaflow {

enum class Shape { Ball, Ellipsoid };

/// Strongly pseudoconvex model domain: a ball or an axis-aligned ellipsoid,
/// carried by its defining function rho = sum_j |z_j|^2 / a_j^2 - 1, which is
/// normalized (-1 <= rho < 0 inside, rho = 0 on the boundary, strictly psh).
struct DomainSpec {
    int n = 1;  // complex dimension, 1 or 2
    Shape shape = Shape::Ball;
    std::array<double, 2> axes{1.0, 1.0};  // semi-axis per complex coordinate

    static DomainSpec ball(int n, double radius);
    static DomainSpec ellipsoid(int n, std::array<double, 2> semi_axes);

    int real_dim() const { return 2 * n; }

    /// Normalized defining function, exact closed form.
    double rho(const Point& z) const;

    /// Signed value of the un-normalized |z|^2-style defining function
    /// (ball only; used for reporting).
    double normalization() const;

    /// Exact Euclidean distance from an inside point to the boundary.
    double boundary_distance(const Point& z) const;

    /// Nearest-point projection onto the boundary (exact for balls, root
    /// solve for ellipsoids).
    Point project_to_boundary(const Point& z) const;

    /// Smallest eigenvalue of the complex Hessian of the normalized rho
    /// (constant for these shapes).
    double hessian_min_eigenvalue() const;

    /// Axis-aligned bounding box of {rho <= 0} expanded by `margin`:
    /// lo_0, hi_0, lo_1, hi_1, ... per real coordinate.
    std::array<double, 8> bounding_box(double margin) const;
};

enum class NodeClass : std::uint8_t { Interior = 0, Band = 1, Exterior = 2 };

/// Masked uniform grid over the bounding box of a DomainSpec.
///
/// Valued nodes (interior + boundary band) get compact indices 0..num_nodes-1;
/// fields store one value per valued node. The band is wide enough that every
/// wide-stencil read of width <= W from an interior node lands on a valued
/// node. Immutable after construction.
struct GridMesh {
    DomainSpec domain;
    double h = 0.0;
    int width = 1;
    double band_width = 0.0;  // W * h * sqrt(2n)

    std::array<int, 4> dims{1, 1, 1, 1};
    std::array<double, 4> origin{};

    std::vector<NodeClass> cls;          // per lattice point
    std::vector<int> node_of_lattice;    // lattice -> valued node index, -1 if exterior
    std::vector<std::int64_t> lattice_of_node;
    std::vector<Point> pos;              // per valued node
    std::vector<int> interior_nodes;     // valued node indices
    std::vector<int> band_nodes;

    int real_dim() const { return domain.real_dim(); }
    int num_nodes() const { return static_cast<int>(pos.size()); }
    int num_interior() const { return static_cast<int>(interior_nodes.size()); }
    int num_band() const { return static_cast<int>(band_nodes.size()); }

    std::int64_t lattice_flat(const std::array<int, 4>& c) const;
    std::array<int, 4> lattice_coords(std::int64_t flat) const;

    bool is_interior(int node) const { return cls[static_cast<std::size_t>(lattice_of_node[node])] == NodeClass::Interior; }
    bool is_band(int node) const { return cls[static_cast<std::size_t>(lattice_of_node[node])] == NodeClass::Band; }
    NodeClass node_class(int node) const { return cls[static_cast<std::size_t>(lattice_of_node[node])]; }

    /// Valued-node index of the lattice neighbor at integer offset `off`
    /// (in units of h), or -1 when the neighbor is exterior / out of box.
    int neighbor(int node, const std::array<int, 4>& off) const;

    /// Text table: node index, 2n real coordinates, class.
    std::string summary_table() const;
};

/// Builds the masked grid. Throws MeshTooCoarse when no interior node exists
/// and NotStrictlyPsh when the defining function fails the strict psh check.
GridMesh build_mesh(const DomainSpec& domain, double h, int stencil_width);

/// Evaluates boundary data at every boundary-band node (direct imposition of
/// the extended data). Result is aligned with mesh.band_nodes.
std::vector<double> dirichlet_trace(const GridMesh& mesh,
                                    const std::function<double(const Point&)>& g);

}  // namespace cmaflow
