#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cmaflow/field.hpp"
#include "cmaflow/frames.hpp"
#include "cmaflow/geometry.hpp"

namespace cmaflow {

/// Discrete Laplacian of the restriction of `field` to the complex line
/// z + zeta*v at an interior node: (sum of the 4 complex-line neighbors
/// - 4*field(z)) / (4 h^2 |v|^2). Exact for functions quadratic on the line.
/// Throws StencilOutOfRange when a read lands outside the valued nodes.
double line_laplacian(const ScalarField& field, const CDir& v, int node);

/// Precomputed stencil tables binding a mesh to a frame set. All reads are
/// resolved to compact node indices once; evaluation is then pure arithmetic
/// over a value vector (safe to share across threads).
struct Stencil {
    const GridMesh* mesh = nullptr;
    FrameSet frames;
    int ndir = 0;
    std::vector<std::int32_t> nbr;   // [interior slot][dir][4] valued-node ids
    std::vector<double> inv_scale;   // 1 / (4 h^2 |v|^2) per direction

    Stencil() = default;
    Stencil(const GridMesh& m, FrameSet fs);

    int interior_count() const { return mesh->num_interior(); }

    double line_lap(const std::vector<double>& vals, int slot, int dir) const {
        const std::int32_t* p = &nbr[(static_cast<std::size_t>(slot) * ndir + dir) * 4];
        const int node = mesh->interior_nodes[static_cast<std::size_t>(slot)];
        const double c = vals[static_cast<std::size_t>(node)];
        return (vals[static_cast<std::size_t>(p[0])] + vals[static_cast<std::size_t>(p[1])] +
                vals[static_cast<std::size_t>(p[2])] + vals[static_cast<std::size_t>(p[3])] - 4.0 * c) *
               inv_scale[static_cast<std::size_t>(dir)];
    }

    /// min over frames of (1/n) sum_i lambda_i |v_i|^2 L_{v_i}; optionally
    /// reports the smallest single line Laplacian seen.
    double frame_min(const std::vector<double>& vals, int slot, double* min_line = nullptr) const;

    /// Clamped Monge-Ampere density [frame_min]_+^n at one interior slot.
    double ma_at(const std::vector<double>& vals, int slot) const;
};

/// Monotone wide-stencil Monge-Ampere density (density units: ma(|z|^2) = 1).
/// Interior nodes carry the density; band nodes are zero.
ScalarField ma_density(const ScalarField& field, const FrameSet& frames);

/// Analytic test function with an optional closed-form Hessian density.
struct TestFunction {
    std::string name;
    std::function<double(const Point&)> value;
    std::function<double(const Point&)> density;  // empty -> finite differences
};

/// Reference oracle: determinant of the complex Hessian (no clamping), from
/// the closed form when provided, otherwise by high-order central differences.
double hessian_density_exact(const TestFunction& f, int n, const Point& z, double fd_step = 0.02);

struct ConsistencyRow {
    std::string name;
    double h = 0.0;
    double max_err = 0.0;
};

/// Max |ma_density - hessian_density_exact| over interior nodes, per test
/// function and mesh spacing.
std::vector<ConsistencyRow> consistency_report(const DomainSpec& domain, const FrameSet& frames,
                                               const std::vector<TestFunction>& tests,
                                               const std::vector<double>& spacings);

std::string to_text(const std::vector<ConsistencyRow>& rows);

}  // namespace cmaflow
