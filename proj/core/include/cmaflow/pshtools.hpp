#pragma once

#include <string>
#include <vector>

#include "cmaflow/field.hpp"
#include "cmaflow/frames.hpp"
#include "cmaflow/operators.hpp"

namespace cmaflow {

struct PshReport {
    bool pass = false;
    double min_line_laplacian = 0.0;
    int worst_node = -1;
    CDir worst_direction{};
    Point worst_point{};
    std::string to_text() const;
};

/// Discrete plurisubharmonicity test: pass iff the smallest complex-line
/// Laplacian over interior nodes and frame directions is >= -tol.
PshReport is_psh(const ScalarField& field, const FrameSet& frames, double tol);

/// Largest discretely psh field below `obstacle` with the obstacle's band
/// values as Dirichlet data. Gauss-Seidel sweeping with the update
/// u(z) <- min(obstacle(z), min over directions of the complex-line average)
/// until the sup-change is <= tol * h^2. Throws NoConvergence.
ScalarField psh_envelope(const ScalarField& obstacle, const FrameSet& frames, double tol,
                         int max_iters = 100000);

/// Sup of the clamped Monge-Ampere density over a set of interior nodes
/// (empty region = all interior nodes).
double maximality_defect(const ScalarField& field, const std::vector<int>& region,
                         const FrameSet& frames);
double maximality_defect(const ScalarField& field, const FrameSet& frames);

}  // namespace cmaflow
